#include "tmwave/projection.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "test_support.hpp"
#include "tmwave/assembly.hpp"
#include "tmwave/errors.hpp"
#include "tmwave/mesh.hpp"

using namespace tmwave;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::shared_ptr<const FeSpace> unit_space(int n) {
    return FeSpace::create(build_mesh(0.0, 1.0, n));
}

CoefficientModel gaussian_model(double beta_sigma = 0.0) {
    GaussianModulationParams p;
    p.alpha_rho = 0.3;
    p.alpha_kappa = 0.5;
    p.beta_sigma = beta_sigma;
    return CoefficientModel::gaussian_modulation(p, {0.0, 1.0});
}

ManufacturedSolution sin_cos_solution() {
    ManufacturedSolution m;
    m.u = [](double x, double t) { return std::sin(kPi * x) * std::cos(t); };
    m.u_t = [](double x, double t) { return -std::sin(kPi * x) * std::sin(t); };
    m.u_x = [](double x, double t) { return kPi * std::cos(kPi * x) * std::cos(t); };
    m.u_tx = [](double x, double t) { return -kPi * std::cos(kPi * x) * std::sin(t); };
    return m;
}

ManufacturedSolution in_space_solution() {
    ManufacturedSolution m;
    m.u = [](double x, double t) { return x * (1.0 - x) * std::cos(t); };
    m.u_t = [](double x, double t) { return -x * (1.0 - x) * std::sin(t); };
    m.u_x = [](double x, double t) { return (1.0 - 2.0 * x) * std::cos(t); };
    m.u_tx = [](double x, double t) { return -(1.0 - 2.0 * x) * std::sin(t); };
    return m;
}

}  // namespace

TEST_CASE("Ritz projection reproduces members of the space") {
    auto space = unit_space(6);
    auto w0 = ritz_project_initial(space, [](double x) { return 1.0 - 2.0 * x; });
    FeFunction exact = interpolate(space, [](double x) { return x * (1.0 - x); }, true);
    for (int i = 0; i < space->n_dofs(); ++i) CHECK(std::abs(w0[i] - exact.dofs[i]) <= 1e-12);
}

TEST_CASE("Ritz projection of zero is zero") {
    auto space = unit_space(5);
    auto w0 = ritz_project_initial(space, [](double) { return 0.0; });
    for (double v : w0) CHECK(v == 0.0);
}

TEST_CASE("Ritz projection converges at second order in H1") {
    std::vector<double> hs, errs;
    for (int n : {8, 16, 32, 64}) {
        auto space = unit_space(n);
        auto w0 = ritz_project_initial(space, [](double x) { return kPi * std::cos(kPi * x); });
        FeFunction w{space, w0};
        auto err = error_vs_callable(
            w, [](double x) { return std::sin(kPi * x); },
            [](double x) { return kPi * std::cos(kPi * x); });
        hs.push_back(1.0 / n);
        errs.push_back(err.h1);
    }
    CHECK(fit_rate(hs, errs) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("gamma selection for models with nonnegative gain/loss weight") {
    // constant model: B = 0, Lambda = 0, gamma = 1
    auto space = unit_space(16);
    auto constant = CoefficientModel::constant(1.0, 1.0, {0.0, 1.0});
    auto sel = select_gamma(space, constant, 1.0, 9);
    CHECK(sel.gamma == 1.0);
    CHECK(sel.lambda_hat <= 1e-9);  // zero up to the bound's safety nudge

    // b >= 0 everywhere: kappa decreasing in t on [0, T]
    ManufacturedCoefficients mc;
    mc.rho = [](double, double) { return 1.0; };
    mc.kappa = [](double, double t) { return 2.0 - 0.5 * t; };
    mc.dt_kappa = [](double, double) { return -0.5; };
    auto damped = CoefficientModel::manufactured(std::move(mc), {0.0, 1.0});
    auto sel2 = select_gamma(space, damped, 1.0, 9);
    CHECK(sel2.lambda_hat <= 1e-9);
    CHECK(sel2.gamma == 1.0);
}

TEST_CASE("gamma selection against the dense generalized-eigenvalue oracle") {
    // b = -1: B is minus the plain mass matrix, Lambda = lambda_max(M)/lambda_min(K)
    auto space = unit_space(10);  // 21 dofs, dense oracle still cheap
    ManufacturedCoefficients mc;
    mc.rho = [](double, double) { return 1.0; };
    mc.kappa = [](double, double t) { return 1.0 / (1.0 + t); };  // d/dt(1/kappa) = -(-1)...
    mc.dt_kappa = [](double, double t) { return -1.0 / ((1.0 + t) * (1.0 + t)); };
    // gain_loss = -dt_kappa/kappa^2 = (1+t)^-2 * (1+t)^2 * ... check below
    auto model = CoefficientModel::manufactured(std::move(mc), {0.0, 1.0});
    // with kappa = 1/(1+t): 1/kappa = 1+t, d/dt(1/kappa) = +1, so flip sign via rho...
    // simpler: verify the field value and adapt the expectation
    const double b_val = model.gain_loss(0.3, 0.4);
    CHECK(b_val == doctest::Approx(1.0).epsilon(1e-12));  // positive: damping

    // force a genuinely negative b: kappa = 1/(3 - t), d/dt(1/kappa) = -1
    ManufacturedCoefficients mc2;
    mc2.rho = [](double, double) { return 1.0; };
    mc2.kappa = [](double, double t) { return 1.0 / (3.0 - t); };
    mc2.dt_kappa = [](double, double t) { return 1.0 / ((3.0 - t) * (3.0 - t)); };
    auto model2 = CoefficientModel::manufactured(std::move(mc2), {0.0, 1.0});
    CHECK(model2.gain_loss(0.3, 0.4) == doctest::Approx(-1.0).epsilon(1e-12));

    auto sel = select_gamma(space, model2, 1.0, 5);

    // dense oracle: B = -M (mass with unit weight), pinned like the library's
    auto m_mat = assemble_weighted_mass(*space, [](double) { return 1.0; }, false);
    apply_dirichlet(*space, m_mat, 0.0);
    auto k_mat = assemble_weighted_stiffness(*space, [](double) { return 1.0; });
    apply_dirichlet(*space, k_mat, 1.0);
    const auto m_eigs = oracle::sym_eigenvalues(oracle::to_dense(m_mat));
    const auto k_eigs = oracle::sym_eigenvalues(oracle::to_dense(k_mat));
    double k_min = k_eigs.front();
    for (double e : k_eigs)
        if (e > 1e-12) {
            k_min = e;
            break;
        }
    const double lambda_exact = m_eigs.back() / k_eigs.front();
    CHECK(sel.lambda_hat >= 0.95 * m_eigs.back() / k_min);
    CHECK(sel.lambda_hat <= 1.10 * lambda_exact);

    // the selected gamma makes gamma*K - M positive definite
    BandedSymMatrix check(k_mat.size(), k_mat.half_bandwidth());
    check.assign_sum(m_mat, sel.gamma, k_mat);
    CHECK_NOTHROW(static_cast<void>(factorize(check, true)));
}

TEST_CASE("projection of an in-space solution is exact up to time error") {
    auto space = unit_space(12);
    auto model = gaussian_model();
    auto exact = in_space_solution();
    const GammaSelection sel = select_gamma(space, model, 0.5, 17);
    ProjectionProblem problem{space, &model, exact, sel.gamma, 0.5};

    const double dt = 5e-5;
    auto traj = run_projection(problem, dt);
    const int n_steps = static_cast<int>(traj.states.size()) - 1;
    for (int j : {0, n_steps / 2, n_steps}) {
        const double t = j * dt;
        FeFunction w{space, traj.states[j]};
        FeFunction uh = interpolate(space, [&](double x) { return exact.u(x, t); }, true);
        double worst = 0.0;
        for (int i = 0; i < space->n_dofs(); ++i)
            worst = std::max(worst, std::abs(w.dofs[i] - uh.dofs[i]));
        CHECK(worst <= 1e-9);
    }
}

TEST_CASE("stationary equilibrium for time-independent data") {
    // u independent of t and b = 0: w stays at the weighted Ritz solution
    auto space = unit_space(10);
    ManufacturedCoefficients mc;
    mc.rho = [](double x, double) { return 1.0 + 0.3 * x; };  // static, nonconstant
    mc.kappa = [](double, double) { return 1.0; };
    mc.dt_kappa = [](double, double) { return 0.0; };
    auto model = CoefficientModel::manufactured(std::move(mc), {0.0, 1.0});

    ManufacturedSolution exact;
    exact.u = [](double x, double) { return std::sin(kPi * x); };
    exact.u_t = [](double, double) { return 0.0; };
    exact.u_x = [](double x, double) { return kPi * std::cos(kPi * x); };
    exact.u_tx = [](double, double) { return 0.0; };

    // start exactly at the weighted Ritz solution: (a grad(w - u), grad chi) = 0
    auto a_mat = assemble_weighted_stiffness(*space, [&](double x) { return model.inv_rho(x, 0.0); });
    apply_dirichlet(*space, a_mat, 1.0);
    const auto& q = assembly_quadrature();
    std::vector<double> rhs(space->n_dofs(), 0.0);
    const auto& mesh = space->mesh();
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const double xl = mesh.element_left(e), h = mesh.element_length(e);
        for (size_t qp = 0; qp < q.points.size(); ++qp) {
            const double x = xl + h * q.points[qp];
            const double g = model.inv_rho(x, 0.0) * exact.u_x(x, 0.0);
            const auto dn = p2::shape_deriv(q.points[qp]);
            for (int l = 0; l < 3; ++l)
                rhs[FeSpace::element_dof(e, l)] += q.weights[qp] * g * dn[l];
        }
    }
    zero_dirichlet(*space, rhs);
    std::vector<double> w = factorize(a_mat, true).solve(rhs);
    const std::vector<double> w_start = w;

    ProjectionProblem problem{space, &model, exact, 1.0, 1.0};
    for (int j = 0; j < 100; ++j) advance_projection(problem, w, j * 0.01, 0.01);
    for (int i = 0; i < space->n_dofs(); ++i) CHECK(std::abs(w[i] - w_start[i]) <= 1e-10);
}

TEST_CASE("projection errors stay bounded and converge in dt") {
    auto space = unit_space(16);
    auto model = gaussian_model();
    auto exact = sin_cos_solution();
    ProjectionProblem problem{space, &model, exact, 1.0, 1.0};

    auto final_state = [&](double dt) {
        auto traj = run_projection(problem, dt);
        return traj.states.back();
    };
    const auto w1 = final_state(0.02);
    const auto w2 = final_state(0.01);
    const auto w4 = final_state(0.005);
    double d12 = 0.0, d24 = 0.0;
    for (int i = 0; i < space->n_dofs(); ++i) {
        d12 = std::max(d12, std::abs(w1[i] - w2[i]));
        d24 = std::max(d24, std::abs(w2[i] - w4[i]));
    }
    // second-order integrator: halving dt quarters the change
    CHECK(d12 / d24 == doctest::Approx(4.0).epsilon(0.25));

    FeFunction w{space, w2};
    auto err = error_vs_callable(
        w, [&](double x) { return exact.u(x, 1.0); }, [&](double x) { return exact.u_x(x, 1.0); });
    CHECK(err.l2 < 0.01);
    CHECK(err.h1 < 0.1);
}

TEST_CASE("system matrices stay symmetric and factorizable over time") {
    auto space = unit_space(20);
    auto model = gaussian_model();
    const GammaSelection sel = select_gamma(space, model, 1.0, 33);
    auto k = assemble_weighted_stiffness(*space, [](double) { return 1.0; });
    apply_dirichlet(*space, k, 1.0);
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> ut(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double t = ut(rng);
        auto b = assemble_weighted_mass(*space, [&](double x) { return model.gain_loss(x, t); },
                                        false);
        apply_dirichlet(*space, b, 0.0);
        BandedSymMatrix sys(k.size(), 2);
        sys.assign_sum(b, sel.gamma, k);
        CHECK_NOTHROW(static_cast<void>(factorize(sys, true)));
    }
}

TEST_CASE("rate study flags exact in-space solutions instead of fitting") {
    auto model = gaussian_model();
    const int levels[] = {8, 16, 24};
    const double samples[] = {0.25, 0.5};
    auto study = projection_rate_study(model, in_space_solution(), levels, 0.5, 1e-4, 0.0,
                                       samples, 9);
    CHECK(study.exact_representation);
    for (const auto& r : study.rows) CHECK(r.err.l2 <= 1e-9);
}
