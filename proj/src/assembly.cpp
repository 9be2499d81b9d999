#include "tmwave/assembly.hpp"

#include <array>
#include <cmath>

#include "tmwave/errors.hpp"

namespace tmwave {

namespace {

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw NonFiniteWeightError(std::string(what) + " evaluated to NaN/Inf");
    return v;
}

}  // namespace

BandedSymMatrix assemble_weighted_mass(const FeSpace& space, const SpatialFn& w, bool lumped) {
    const auto& mesh = space.mesh();
    if (lumped) {
        // Collocated nodes at element endpoints evaluate the weight just
        // inside the element, so a coefficient jump meshed at a vertex is
        // sampled on the correct side from both neighbors.
        constexpr double kInside = 1e-9;
        constexpr std::array<double, 3> eval_xi = {kInside, 0.5, 1.0 - kInside};
        BandedSymMatrix m(space.n_dofs(), 0);
        for (int e = 0; e < mesh.n_elements(); ++e) {
            const double xl = mesh.element_left(e);
            const double h = mesh.element_length(e);
            for (int l = 0; l < 3; ++l) {
                const double x = xl + h * eval_xi[l];
                const int k = FeSpace::element_dof(e, l);
                m.band(0, k) += h * p2::lobatto_weight[l] * checked(w(x), "mass weight");
            }
        }
        return m;
    }
    BandedSymMatrix m(space.n_dofs(), 2);
    const auto& q = assembly_quadrature();
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const double xl = mesh.element_left(e);
        const double h = mesh.element_length(e);
        for (size_t qp = 0; qp < q.points.size(); ++qp) {
            const double xi = q.points[qp];
            const double wx = h * q.weights[qp] * checked(w(xl + h * xi), "mass weight");
            const auto n = p2::shape(xi);
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b <= a; ++b)
                    m.add(FeSpace::element_dof(e, a), FeSpace::element_dof(e, b),
                          wx * n[a] * n[b]);
        }
    }
    return m;
}

BandedSymMatrix assemble_weighted_stiffness(const FeSpace& space, const SpatialFn& w) {
    BandedSymMatrix k(space.n_dofs(), 2);
    const auto& mesh = space.mesh();
    const auto& q = assembly_quadrature();
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const double xl = mesh.element_left(e);
        const double h = mesh.element_length(e);
        for (size_t qp = 0; qp < q.points.size(); ++qp) {
            const double xi = q.points[qp];
            const double wx = q.weights[qp] / h * checked(w(xl + h * xi), "stiffness weight");
            const auto dn = p2::shape_deriv(xi);
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b <= a; ++b)
                    k.add(FeSpace::element_dof(e, a), FeSpace::element_dof(e, b),
                          wx * dn[a] * dn[b]);
        }
    }
    return k;
}

std::vector<double> assemble_load(const FeSpace& space, const SpatialFn& f) {
    std::vector<double> v(space.n_dofs(), 0.0);
    const auto& mesh = space.mesh();
    const auto& q = assembly_quadrature();
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const double xl = mesh.element_left(e);
        const double h = mesh.element_length(e);
        for (size_t qp = 0; qp < q.points.size(); ++qp) {
            const double xi = q.points[qp];
            const double wx = h * q.weights[qp] * checked(f(xl + h * xi), "load");
            const auto n = p2::shape(xi);
            for (int a = 0; a < 3; ++a) v[FeSpace::element_dof(e, a)] += wx * n[a];
        }
    }
    return v;
}

void apply_dirichlet(const FeSpace& space, BandedSymMatrix& A, std::span<double> rhs, double pin) {
    apply_dirichlet(space, A, pin);
    zero_dirichlet(space, rhs);
}

void apply_dirichlet(const FeSpace& space, BandedSymMatrix& A, double pin) {
    const int n = A.size();
    const int hb = A.half_bandwidth();
    for (int k : space.dirichlet_dofs()) {
        for (int d = 1; d <= hb; ++d) {
            if (k - d >= 0) A.band(d, k - d) = 0.0;  // row k, columns k-d
            if (k + d < n) A.band(d, k) = 0.0;       // column k, rows k+d
        }
        A.band(0, k) = pin;
    }
}

void zero_dirichlet(const FeSpace& space, std::span<double> v) {
    for (int k : space.dirichlet_dofs()) v[k] = 0.0;
}

}  // namespace tmwave
