#pragma once

#include <span>
#include <vector>

#include "tmwave/coefficients.hpp"
#include "tmwave/fe_space.hpp"
#include "tmwave/stepping.hpp"

namespace tmwave {

struct ErrorPair {
    double l2 = 0.0;
    double h1 = 0.0;  // full norm: sqrt(l2^2 + seminorm^2)
};

/// L2 and H1 errors of a finite element function against an analytic
/// solution. Measured with the 6-point Gauss rule per element, two
/// orders above the assembly rule, so the measurement does not alias
/// the error it measures.
ErrorPair error_vs_callable(const FeFunction& f, const SpatialFn& exact,
                            const SpatialFn& exact_derivative);

/// Errors of a coarse function against a reference on a nested finer
/// mesh. The coarse function is evaluated exactly at the fine-mesh
/// quadrature points; by nestedness no coarse element boundary falls
/// inside a fine element. Throws NotNestedError if the coarse vertices
/// are not a subset of the fine vertices.
ErrorPair error_vs_reference(const FeFunction& coarse, const FeFunction& fine);

struct RateRow {
    double h = 0.0;
    double dt = 0.0;
    double err_l2 = 0.0;
    double err_h1 = 0.0;
};

struct RateTable {
    std::vector<RateRow> rows;  // h strictly decreasing
    double slope_l2 = 0.0;
    double slope_h1 = 0.0;
};

/// Least-squares slope of log(err) vs log(h). Throws DegenerateFitError
/// when any error is <= 0 (exact representation; report, don't fit).
double fit_rate(std::span<const double> h, std::span<const double> err);

/// Fill in both slopes of a table.
void fit_rates(RateTable& table);

/// Energy diagnostic
///   E = 1/2 int (1/kappa) ((u^n - u^{n-1})/dt)^2 + 1/2 int (1/rho) (d/dx u^n)^2
/// evaluated with the assembly quadrature at t = t_curr. The backward
/// difference velocity carries an O(dt) bias; diagnostic use only.
double energy(const WaveState& state, const CoefficientModel& model, const FeSpace& space);

}  // namespace tmwave
