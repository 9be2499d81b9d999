#pragma once

#include <span>
#include <vector>

#include "tmwave/banded.hpp"
#include "tmwave/fe_space.hpp"

namespace tmwave {

/// Weighted mass matrix: (k, l) entry = integral of w(x) phi_k phi_l.
///
/// Consistent assembly uses the fixed 4-point Gauss rule per element;
/// lumped assembly collocates the 3-point Gauss-Lobatto rule at the
/// nodes, which yields a diagonal matrix (returned with bandwidth 0).
/// Throws NonFiniteWeightError if w is NaN/Inf at an evaluation point.
BandedSymMatrix assemble_weighted_mass(const FeSpace& space, const SpatialFn& w, bool lumped);

/// Weighted stiffness matrix: entry = integral of w(x) phi_k' phi_l'.
BandedSymMatrix assemble_weighted_stiffness(const FeSpace& space, const SpatialFn& w);

/// Load vector: component l = integral of f(x) phi_l.
std::vector<double> assemble_load(const FeSpace& space, const SpatialFn& f);

/// Replace the Dirichlet rows/columns by pin * identity rows and zero
/// the corresponding rhs entries. Symmetry and bandedness are kept.
/// pin = 0 is used for matrices that enter additive combinations so the
/// summed system keeps a single unit diagonal.
void apply_dirichlet(const FeSpace& space, BandedSymMatrix& A, std::span<double> rhs,
                     double pin = 1.0);
void apply_dirichlet(const FeSpace& space, BandedSymMatrix& A, double pin = 1.0);
void zero_dirichlet(const FeSpace& space, std::span<double> v);

}  // namespace tmwave
