#include "tmwave/projection.hpp"

#include <algorithm>
#include <cmath>

#include "tmwave/assembly.hpp"
#include "tmwave/errors.hpp"
#include "tmwave/mesh.hpp"

namespace tmwave {

namespace {

// F_l(t) = (a(.,t) u_x, phi_l') + gamma (u_tx, phi_l') + (b(.,t) u_t, phi_l)
std::vector<double> assemble_projection_rhs(const ProjectionProblem& p, double t) {
    const FeSpace& space = *p.space;
    const auto& mesh = space.mesh();
    const auto& q = assembly_quadrature();
    const CoefficientModel& model = *p.model;
    std::vector<double> rhs(space.n_dofs(), 0.0);
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const double xl = mesh.element_left(e);
        const double h = mesh.element_length(e);
        for (size_t qp = 0; qp < q.points.size(); ++qp) {
            const double xi = q.points[qp];
            const double x = xl + h * xi;
            const auto n = p2::shape(xi);
            const auto dn = p2::shape_deriv(xi);
            const double grad_part =
                model.inv_rho(x, t) * p.exact.u_x(x, t) + p.gamma * p.exact.u_tx(x, t);
            const double mass_part = model.gain_loss(x, t) * p.exact.u_t(x, t);
            for (int l = 0; l < 3; ++l) {
                const int k = FeSpace::element_dof(e, l);
                // (g, phi') picks up dn/h against the h-weighted rule
                rhs[k] += q.weights[qp] * grad_part * dn[l];
                rhs[k] += h * q.weights[qp] * mass_part * n[l];
            }
        }
    }
    zero_dirichlet(space, rhs);
    return rhs;
}

BandedSymMatrix plain_stiffness(const FeSpace& space) {
    BandedSymMatrix k = assemble_weighted_stiffness(space, [](double) { return 1.0; });
    apply_dirichlet(space, k, 1.0);
    return k;
}

BandedSymMatrix gain_loss_mass(const FeSpace& space, const CoefficientModel& model, double t) {
    BandedSymMatrix b =
        assemble_weighted_mass(space, [&](double x) { return model.gain_loss(x, t); }, false);
    apply_dirichlet(space, b, 0.0);
    return b;
}

BandedSymMatrix weighted_stiffness_a(const FeSpace& space, const CoefficientModel& model,
                                     double t) {
    BandedSymMatrix a =
        assemble_weighted_stiffness(space, [&](double x) { return model.inv_rho(x, t); });
    apply_dirichlet(space, a, 0.0);
    return a;
}

// Shared stepping core with the constant matrices assembled once.
class ProjectionIntegrator {
public:
    explicit ProjectionIntegrator(const ProjectionProblem& p)
        : p_(p), stiffness_(plain_stiffness(*p.space)) {}

    void step(std::vector<double>& w, double t, double dt) {
        const double tm = t + 0.5 * dt;
        const BandedSymMatrix b = gain_loss_mass(*p_.space, *p_.model, tm);
        const BandedSymMatrix a = weighted_stiffness_a(*p_.space, *p_.model, tm);

        BandedSymMatrix system(stiffness_.size(), stiffness_.half_bandwidth());
        system.assign_sum(b, p_.gamma, stiffness_);

        BandedSymMatrix lhs(system.size(), system.half_bandwidth());
        lhs.assign_sum(system, 0.5 * dt, a);
        BandedSymMatrix rhs_mat(system.size(), system.half_bandwidth());
        rhs_mat.assign_sum(system, -0.5 * dt, a);

        std::vector<double> rhs = rhs_mat.matvec(w);
        const std::vector<double> f = assemble_projection_rhs(p_, tm);
        for (size_t i = 0; i < rhs.size(); ++i) rhs[i] += dt * f[i];
        zero_dirichlet(*p_.space, rhs);

        w = factorize(lhs, true).solve(rhs);
        zero_dirichlet(*p_.space, w);
    }

private:
    const ProjectionProblem& p_;
    BandedSymMatrix stiffness_;
};

}  // namespace

std::vector<double> ritz_project_initial(const std::shared_ptr<const FeSpace>& space,
                                         const SpatialFn& u0_derivative) {
    const auto& mesh = space->mesh();
    const auto& q = assembly_quadrature();
    std::vector<double> rhs(space->n_dofs(), 0.0);
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const double xl = mesh.element_left(e);
        const double h = mesh.element_length(e);
        for (size_t qp = 0; qp < q.points.size(); ++qp) {
            const double xi = q.points[qp];
            const double g = u0_derivative(xl + h * xi);
            const auto dn = p2::shape_deriv(xi);
            for (int l = 0; l < 3; ++l)
                rhs[FeSpace::element_dof(e, l)] += q.weights[qp] * g * dn[l];
        }
    }
    zero_dirichlet(*space, rhs);
    BandedSymMatrix k = plain_stiffness(*space);
    return factorize(k, true).solve(rhs);
}

double lambda_hat(const FeSpace& space, const CoefficientModel& model, double T,
                  int n_time_samples) {
    if (n_time_samples < 2) throw ValidationError("lambda_hat: need at least 2 time samples");
    BandedSymMatrix k = plain_stiffness(space);
    const double k_min = min_eig_lower_bound(k);
    if (!(k_min > 0.0))
        throw NotPositiveDefiniteError("lambda_hat: stiffness lower bound not positive");
    double worst = 0.0;
    for (int j = 0; j < n_time_samples; ++j) {
        const double t = T * j / (n_time_samples - 1);
        const BandedSymMatrix b = gain_loss_mass(space, model, t);
        const double b_min = min_eig_lower_bound(b);
        worst = std::max(worst, std::max(0.0, -b_min));
    }
    return worst / k_min;
}

GammaSelection select_gamma(const std::shared_ptr<const FeSpace>& space,
                            const CoefficientModel& model, double T, int n_time_samples) {
    GammaSelection sel;
    sel.lambda_hat = lambda_hat(*space, model, T, n_time_samples);
    sel.gamma = std::max(1.0, 2.0 * sel.lambda_hat);

    const BandedSymMatrix k = plain_stiffness(*space);
    for (int attempt = 0; attempt <= 10; ++attempt) {
        bool ok = true;
        for (int j = 0; j < n_time_samples && ok; ++j) {
            const double t = T * j / (n_time_samples - 1);
            const BandedSymMatrix b = gain_loss_mass(*space, model, t);
            BandedSymMatrix system(k.size(), k.half_bandwidth());
            system.assign_sum(b, sel.gamma, k);
            try {
                factorize(system, true);
            } catch (const NotPositiveDefiniteError&) {
                ok = false;
            }
        }
        if (ok) {
            sel.doublings = attempt;
            return sel;
        }
        sel.gamma *= 2.0;
    }
    throw GammaSearchFailedError(
        "select_gamma: gamma K + B(t) not positive definite after 10 doublings");
}

void advance_projection(const ProjectionProblem& problem, std::vector<double>& w, double t,
                        double dt) {
    ProjectionIntegrator integrator(problem);
    integrator.step(w, t, dt);
}

ProjectionTrajectory run_projection(const ProjectionProblem& problem, double dt) {
    ProjectionTrajectory traj;
    traj.dt = dt;
    const int n_steps = static_cast<int>(std::llround(problem.T / dt));
    std::vector<double> w = ritz_project_initial(
        problem.space, [&](double x) { return problem.exact.u_x(x, 0.0); });
    traj.states.reserve(n_steps + 1);
    traj.states.push_back(w);
    ProjectionIntegrator integrator(problem);
    for (int j = 0; j < n_steps; ++j) {
        integrator.step(w, j * dt, dt);
        traj.states.push_back(w);
    }
    return traj;
}

ProjectionStudyResult projection_rate_study(const CoefficientModel& model,
                                            const ManufacturedSolution& exact,
                                            std::span<const int> mesh_levels, double T, double dt0,
                                            double dt_exponent,
                                            std::span<const double> sample_times,
                                            int gamma_time_samples) {
    if (mesh_levels.size() < 2)
        throw ValidationError("projection_rate_study: need at least 2 mesh levels");
    const Interval dom = model.domain();

    auto make_space = [&](int n) {
        return FeSpace::create(build_mesh(dom.left, dom.right, n, model.interface_vertices()));
    };

    ProjectionStudyResult result;
    const auto coarse_space = make_space(mesh_levels[0]);
    const GammaSelection sel = select_gamma(coarse_space, model, T, gamma_time_samples);
    result.gamma = sel.gamma;
    result.lambda_hat_min = result.lambda_hat_max = sel.lambda_hat;

    const double h0 = coarse_space->mesh().max_element_length();
    for (int n : mesh_levels) {
        const auto space = make_space(n);
        const double h = space->mesh().max_element_length();
        if (n != mesh_levels[0]) {
            const double lh = lambda_hat(*space, model, T, gamma_time_samples);
            result.lambda_hat_min = std::min(result.lambda_hat_min, lh);
            result.lambda_hat_max = std::max(result.lambda_hat_max, lh);
        }

        const double dt_nominal = dt0 * std::pow(h / h0, dt_exponent);
        const int n_steps = std::max(1, static_cast<int>(std::ceil(T / dt_nominal - 1e-9)));
        const double dt = T / n_steps;

        ProjectionProblem problem{space, &model, exact, result.gamma, T};
        const ProjectionTrajectory traj = run_projection(problem, dt);

        ProjectionRateRow row;
        row.h = h;
        row.dt = dt;
        for (double ts : sample_times) {
            const int j = std::clamp(static_cast<int>(std::llround(ts / dt)), 0, n_steps);
            const double tj = j * dt;
            FeFunction w{space, traj.states[j]};
            const ErrorPair e = error_vs_callable(
                w, [&](double x) { return exact.u(x, tj); },
                [&](double x) { return exact.u_x(x, tj); });
            row.err.l2 = std::max(row.err.l2, e.l2);
            row.err.h1 = std::max(row.err.h1, e.h1);
            if (j > 0 && j < n_steps) {
                FeFunction wdot{space, std::vector<double>(space->n_dofs())};
                for (int i = 0; i < space->n_dofs(); ++i)
                    wdot.dofs[i] = (traj.states[j + 1][i] - traj.states[j - 1][i]) / (2.0 * dt);
                const ErrorPair et = error_vs_callable(
                    wdot, [&](double x) { return exact.u_t(x, tj); },
                    [&](double x) { return exact.u_tx(x, tj); });
                row.err_dt.l2 = std::max(row.err_dt.l2, et.l2);
                row.err_dt.h1 = std::max(row.err_dt.h1, et.h1);
            }
        }
        result.rows.push_back(row);
    }

    result.exact_representation = true;
    for (const auto& r : result.rows)
        if (r.err.l2 > 1e-9 || r.err.h1 > 1e-8) result.exact_representation = false;
    if (!result.exact_representation) {
        std::vector<double> h, e2, e1, d2, d1;
        for (const auto& r : result.rows) {
            h.push_back(r.h);
            e2.push_back(r.err.l2);
            e1.push_back(r.err.h1);
            d2.push_back(r.err_dt.l2);
            d1.push_back(r.err_dt.h1);
        }
        result.slope_l2 = fit_rate(h, e2);
        result.slope_h1 = fit_rate(h, e1);
        result.slope_dt_l2 = fit_rate(h, d2);
        result.slope_dt_h1 = fit_rate(h, d1);
    }
    return result;
}

}  // namespace tmwave
