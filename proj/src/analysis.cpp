#include "tmwave/analysis.hpp"

#include <cmath>

#include "tmwave/errors.hpp"

namespace tmwave {

ErrorPair error_vs_callable(const FeFunction& f, const SpatialFn& exact,
                            const SpatialFn& exact_derivative) {
    const auto& mesh = f.space->mesh();
    const auto& q = error_quadrature();
    double l2sq = 0.0, semisq = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const double xl = mesh.element_left(e);
        const double h = mesh.element_length(e);
        for (size_t qp = 0; qp < q.points.size(); ++qp) {
            const double xi = q.points[qp];
            const double x = xl + h * xi;
            const double w = h * q.weights[qp];
            const double dv = f.evaluate_local(e, xi) - exact(x);
            const double dd = f.evaluate_local_derivative(e, xi) - exact_derivative(x);
            l2sq += w * dv * dv;
            semisq += w * dd * dd;
        }
    }
    return {std::sqrt(l2sq), std::sqrt(l2sq + semisq)};
}

ErrorPair error_vs_reference(const FeFunction& coarse, const FeFunction& fine) {
    const auto& cm = coarse.space->mesh();
    const auto& fm = fine.space->mesh();
    for (double v : cm.vertices)
        if (!fm.has_vertex(v, 1e-12 * std::max(1.0, std::abs(v))))
            throw NotNestedError("error_vs_reference: coarse vertices not contained in fine mesh");

    const auto& q = error_quadrature();
    double l2sq = 0.0, semisq = 0.0;
    for (int e = 0; e < fm.n_elements(); ++e) {
        const double xl = fm.element_left(e);
        const double h = fm.element_length(e);
        for (size_t qp = 0; qp < q.points.size(); ++qp) {
            const double xi = q.points[qp];
            const double x = xl + h * xi;
            const double w = h * q.weights[qp];
            const double dv = fine.evaluate_local(e, xi) - coarse.evaluate(x);
            const double dd = fine.evaluate_local_derivative(e, xi) - coarse.evaluate_derivative(x);
            l2sq += w * dv * dv;
            semisq += w * dd * dd;
        }
    }
    return {std::sqrt(l2sq), std::sqrt(l2sq + semisq)};
}

double fit_rate(std::span<const double> h, std::span<const double> err) {
    if (h.size() != err.size() || h.size() < 2)
        throw DimensionMismatchError("fit_rate: needs matching h/err with at least 2 rows");
    for (double e : err)
        if (!(e > 0.0)) throw DegenerateFitError("fit_rate: non-positive error value");
    const size_t n = h.size();
    double sx = 0.0, sy = 0.0;
    std::vector<double> lx(n), ly(n);
    for (size_t i = 0; i < n; ++i) {
        lx[i] = std::log(h[i]);
        ly[i] = std::log(err[i]);
        sx += lx[i];
        sy += ly[i];
    }
    const double mx = sx / n, my = sy / n;
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < n; ++i) {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
    }
    return num / den;
}

void fit_rates(RateTable& table) {
    std::vector<double> h, e2, e1;
    for (const auto& r : table.rows) {
        h.push_back(r.h);
        e2.push_back(r.err_l2);
        e1.push_back(r.err_h1);
    }
    table.slope_l2 = fit_rate(h, e2);
    table.slope_h1 = fit_rate(h, e1);
}

double energy(const WaveState& state, const CoefficientModel& model, const FeSpace& space) {
    const auto& mesh = space.mesh();
    const auto& q = assembly_quadrature();
    const double t = state.t_curr;
    const double inv_dt = 1.0 / state.dt;
    double kinetic = 0.0, potential = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const double xl = mesh.element_left(e);
        const double h = mesh.element_length(e);
        for (size_t qp = 0; qp < q.points.size(); ++qp) {
            const double xi = q.points[qp];
            const double x = xl + h * xi;
            const double w = h * q.weights[qp];
            const auto n = p2::shape(xi);
            const auto dn = p2::shape_deriv(xi);
            double v = 0.0, du = 0.0;
            for (int l = 0; l < 3; ++l) {
                const int k = FeSpace::element_dof(e, l);
                v += (state.u_curr[k] - state.u_prev[k]) * n[l];
                du += state.u_curr[k] * dn[l];
            }
            v *= inv_dt;
            du /= h;
            kinetic += 0.5 * w * model.inv_kappa(x, t) * v * v;
            potential += 0.5 * w * model.inv_rho(x, t) * du * du;
        }
    }
    return kinetic + potential;
}

}  // namespace tmwave
