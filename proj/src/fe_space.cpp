#include "tmwave/fe_space.hpp"

#include <cmath>

#include "tmwave/errors.hpp"

namespace tmwave {

const QuadratureRule& assembly_quadrature() {
    static const QuadratureRule rule = [] {
        // 4-point Gauss-Legendre mapped from [-1, 1] to [0, 1]
        const double r1 = 0.33998104358485626480;
        const double r2 = 0.86113631159405257522;
        const double w1 = 0.65214515486254614263;
        const double w2 = 0.34785484513745385737;
        QuadratureRule q;
        q.points = {0.5 * (1.0 - r2), 0.5 * (1.0 - r1), 0.5 * (1.0 + r1), 0.5 * (1.0 + r2)};
        q.weights = {0.5 * w2, 0.5 * w1, 0.5 * w1, 0.5 * w2};
        return q;
    }();
    return rule;
}

const QuadratureRule& error_quadrature() {
    static const QuadratureRule rule = [] {
        const double r1 = 0.23861918608319690863;
        const double r2 = 0.66120938646626451366;
        const double r3 = 0.93246951420315202781;
        const double w1 = 0.46791393457269104739;
        const double w2 = 0.36076157304813860757;
        const double w3 = 0.17132449237917034504;
        QuadratureRule q;
        q.points = {0.5 * (1.0 - r3), 0.5 * (1.0 - r2), 0.5 * (1.0 - r1),
                    0.5 * (1.0 + r1), 0.5 * (1.0 + r2), 0.5 * (1.0 + r3)};
        q.weights = {0.5 * w3, 0.5 * w2, 0.5 * w1, 0.5 * w1, 0.5 * w2, 0.5 * w3};
        return q;
    }();
    return rule;
}

FeSpace::FeSpace(Mesh1D mesh) : mesh_(std::move(mesh)) {
    const int ne = mesh_.n_elements();
    dof_coords_.resize(2 * ne + 1);
    for (int e = 0; e < ne; ++e) {
        dof_coords_[2 * e] = mesh_.vertices[e];
        dof_coords_[2 * e + 1] = 0.5 * (mesh_.vertices[e] + mesh_.vertices[e + 1]);
    }
    dof_coords_[2 * ne] = mesh_.vertices[ne];
}

std::shared_ptr<const FeSpace> FeSpace::create(Mesh1D mesh) {
    return std::shared_ptr<const FeSpace>(new FeSpace(std::move(mesh)));
}

double FeFunction::evaluate_local(int e, double xi) const {
    const auto n = p2::shape(xi);
    double v = 0.0;
    for (int l = 0; l < 3; ++l) v += dofs[FeSpace::element_dof(e, l)] * n[l];
    return v;
}

double FeFunction::evaluate_local_derivative(int e, double xi) const {
    const auto dn = p2::shape_deriv(xi);
    double v = 0.0;
    for (int l = 0; l < 3; ++l) v += dofs[FeSpace::element_dof(e, l)] * dn[l];
    return v / space->mesh().element_length(e);
}

double FeFunction::evaluate(double x) const {
    const int e = space->mesh().locate(x);
    const double xi = (x - space->mesh().element_left(e)) / space->mesh().element_length(e);
    return evaluate_local(e, xi);
}

double FeFunction::evaluate_derivative(double x) const {
    const int e = space->mesh().locate(x);
    const double xi = (x - space->mesh().element_left(e)) / space->mesh().element_length(e);
    return evaluate_local_derivative(e, xi);
}

FeFunction interpolate(std::shared_ptr<const FeSpace> space, const SpatialFn& g,
                       bool homogeneous_bc) {
    FeFunction f{space, std::vector<double>(space->n_dofs())};
    const auto coords = space->dof_coords();
    for (int k = 0; k < space->n_dofs(); ++k) f.dofs[k] = g(coords[k]);
    if (homogeneous_bc)
        for (int k : space->dirichlet_dofs()) f.dofs[k] = 0.0;
    return f;
}

}  // namespace tmwave
