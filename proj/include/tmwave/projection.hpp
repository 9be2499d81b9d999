#pragma once

#include <memory>
#include <span>
#include <vector>

#include "tmwave/analysis.hpp"
#include "tmwave/banded.hpp"
#include "tmwave/coefficients.hpp"
#include "tmwave/fe_space.hpp"

namespace tmwave {

/// A smooth space-time function with the derivatives the projection
/// right-hand side needs. All evaluators are analytic by contract.
struct ManufacturedSolution {
    SpaceTimeFn u;
    SpaceTimeFn u_t;
    SpaceTimeFn u_x;
    SpaceTimeFn u_tx;
};

/// Data of the time-dependent projection w(t): the finite element
/// function defined by the first-order system
///   (gamma K + B(t)) dC/dt + A(t) C = F(t)
/// where K is the plain stiffness matrix, A(t) the stiffness matrix
/// weighted by 1/rho, B(t) the mass matrix weighted by the gain/loss
/// coefficient, and F(t) is assembled from the exact solution. gamma
/// must exceed Lambda = max{0, -lambda_min(B)} / lambda_min(K) so the
/// system matrix stays positive definite.
struct ProjectionProblem {
    std::shared_ptr<const FeSpace> space;
    const CoefficientModel* model = nullptr;
    ManufacturedSolution exact;
    double gamma = 1.0;
    double T = 1.0;
};

/// Standard Ritz projection of the initial value: solve
/// (grad(w0 - u0), grad chi) = 0, i.e. K w0 = [integral u0' phi_l'],
/// with homogeneous Dirichlet elimination.
std::vector<double> ritz_project_initial(const std::shared_ptr<const FeSpace>& space,
                                         const SpatialFn& u0_derivative);

/// Sampled estimate of Lambda = max_t max{0, -lambda_min(B(t))} / lambda_min(K),
/// using guaranteed one-sided eigenvalue bounds on both sides.
double lambda_hat(const FeSpace& space, const CoefficientModel& model, double T,
                  int n_time_samples);

struct GammaSelection {
    double gamma = 1.0;
    double lambda_hat = 0.0;
    int doublings = 0;  // extra doublings the PD verification required
};

/// gamma = max(1, 2 * Lambda_hat), verified by an LDL^T positive
/// definiteness check of gamma K + B(t) at every sampled time and
/// doubled until the check passes (at most 10 times).
GammaSelection select_gamma(const std::shared_ptr<const FeSpace>& space,
                            const CoefficientModel& model, double T, int n_time_samples);

/// One Crank-Nicolson (midpoint) step: with t* = t + dt/2 solve
///   (gamma K + B(t*) + dt/2 A(t*)) C_next
///     = (gamma K + B(t*) - dt/2 A(t*)) C + dt F(t*).
void advance_projection(const ProjectionProblem& problem, std::vector<double>& w, double t,
                        double dt);

struct ProjectionTrajectory {
    double dt = 0.0;
    std::vector<std::vector<double>> states;  // states[j] holds C at t = j * dt
};

/// Integrate the projection system from the Ritz initial value to T.
/// dt should divide T.
ProjectionTrajectory run_projection(const ProjectionProblem& problem, double dt);

struct ProjectionRateRow {
    double h = 0.0;
    double dt = 0.0;
    ErrorPair err;     // max over sample times of ||w - u||
    ErrorPair err_dt;  // max over interior sample times of ||(w - u)_t||
};

struct ProjectionStudyResult {
    std::vector<ProjectionRateRow> rows;
    double gamma = 1.0;
    double lambda_hat_min = 0.0;  // across mesh levels
    double lambda_hat_max = 0.0;
    bool exact_representation = false;  // all errors at roundoff; slopes not fitted
    double slope_l2 = 0.0;
    double slope_h1 = 0.0;
    double slope_dt_l2 = 0.0;
    double slope_dt_h1 = 0.0;
};

/// Rate study over a mesh sequence with dt = dt0 * (h/h0)^dt_exponent
/// (adjusted to divide T). Errors are sampled at the snapshot times
/// nearest step; derivative errors use centered differencing of the
/// computed trajectory.
ProjectionStudyResult projection_rate_study(const CoefficientModel& model,
                                            const ManufacturedSolution& exact,
                                            std::span<const int> mesh_levels, double T, double dt0,
                                            double dt_exponent, std::span<const double> sample_times,
                                            int gamma_time_samples = 33);

}  // namespace tmwave
