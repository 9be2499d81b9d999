#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "tmwave/mesh.hpp"

namespace tmwave {

using SpatialFn = std::function<double(double)>;

/// Degree-2 Lagrange shape functions on the reference element [0, 1]
/// with nodes at {0, 1/2, 1} (the 3-point Gauss-Lobatto set).
namespace p2 {
inline std::array<double, 3> shape(double xi) {
    return {2.0 * xi * xi - 3.0 * xi + 1.0, 4.0 * xi * (1.0 - xi), xi * (2.0 * xi - 1.0)};
}
inline std::array<double, 3> shape_deriv(double xi) {
    return {4.0 * xi - 3.0, 4.0 - 8.0 * xi, 4.0 * xi - 1.0};
}
inline constexpr std::array<double, 3> node_xi = {0.0, 0.5, 1.0};
/// Gauss-Lobatto quadrature weights on [0, 1] collocated at the nodes.
inline constexpr std::array<double, 3> lobatto_weight = {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0};
}  // namespace p2

/// Quadrature rules on [0, 1].
struct QuadratureRule {
    std::vector<double> points;
    std::vector<double> weights;  // sum to 1
};

/// 4-point Gauss-Legendre (exact through degree 7): the assembly rule.
const QuadratureRule& assembly_quadrature();
/// 6-point Gauss-Legendre (exact through degree 11): the error-norm rule.
const QuadratureRule& error_quadrature();

/// Continuous piecewise-quadratic finite element space on a 1D mesh,
/// with degrees of freedom at element endpoints and midpoints and the
/// two boundary nodes tracked for homogeneous Dirichlet conditions.
class FeSpace {
public:
    static std::shared_ptr<const FeSpace> create(Mesh1D mesh);

    [[nodiscard]] const Mesh1D& mesh() const noexcept { return mesh_; }
    [[nodiscard]] int n_dofs() const noexcept { return static_cast<int>(dof_coords_.size()); }
    [[nodiscard]] std::span<const double> dof_coords() const noexcept { return dof_coords_; }
    [[nodiscard]] std::array<int, 2> dirichlet_dofs() const noexcept {
        return {0, n_dofs() - 1};
    }
    /// Global dof of local node `local` (0 = left, 1 = mid, 2 = right) of element e.
    [[nodiscard]] static int element_dof(int e, int local) noexcept { return 2 * e + local; }

    static constexpr int degree = 2;
    static constexpr int dofs_per_element = 3;

private:
    explicit FeSpace(Mesh1D mesh);
    Mesh1D mesh_;
    std::vector<double> dof_coords_;
};

/// A function in an FeSpace, represented by its coefficient vector.
struct FeFunction {
    std::shared_ptr<const FeSpace> space;
    std::vector<double> dofs;

    [[nodiscard]] double evaluate(double x) const;
    /// Piecewise derivative; left-limit convention at element boundaries.
    [[nodiscard]] double evaluate_derivative(double x) const;
    /// Evaluate within a known element at reference coordinate xi.
    [[nodiscard]] double evaluate_local(int e, double xi) const;
    [[nodiscard]] double evaluate_local_derivative(int e, double xi) const;
};

/// Nodal interpolant of g. When homogeneous_bc is set the two boundary
/// dofs are forced to zero.
FeFunction interpolate(std::shared_ptr<const FeSpace> space, const SpatialFn& g,
                       bool homogeneous_bc = false);

}  // namespace tmwave
