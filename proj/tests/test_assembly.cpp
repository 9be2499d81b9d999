#include "tmwave/assembly.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "tmwave/errors.hpp"
#include "tmwave/mesh.hpp"

using namespace tmwave;

namespace {

constexpr double kPi = 3.14159265358979323846;

auto one = [](double) { return 1.0; };

std::shared_ptr<const FeSpace> unit_space(int n) {
    return FeSpace::create(build_mesh(0.0, 1.0, n));
}

}  // namespace

TEST_CASE("consistent P2 mass matrix on a single element") {
    auto space = unit_space(1);
    auto m = assemble_weighted_mass(*space, one, false);
    // exact symbolic integrals of the degree-2 Lagrange products
    const double expected[3][3] = {{4.0, 2.0, -1.0}, {2.0, 16.0, 2.0}, {-1.0, 2.0, 4.0}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(m.at(i, j) == doctest::Approx(expected[i][j] / 30.0).epsilon(1e-14));
}

TEST_CASE("lumped P2 mass matrix equals the Gauss-Lobatto weights") {
    auto space = unit_space(1);
    auto m = assemble_weighted_mass(*space, one, true);
    CHECK(m.half_bandwidth() == 0);
    CHECK(m.at(0, 0) == 1.0 / 6.0);
    CHECK(m.at(1, 1) == 2.0 / 3.0);
    CHECK(m.at(2, 2) == 1.0 / 6.0);
}

TEST_CASE("zero weight gives the zero matrix") {
    auto space = unit_space(3);
    auto m = assemble_weighted_mass(*space, [](double) { return 0.0; }, false);
    CHECK(m.inf_norm() == 0.0);
}

TEST_CASE("P2 stiffness matrix on a single element") {
    auto space = unit_space(1);
    auto k = assemble_weighted_stiffness(*space, one);
    const double expected[3][3] = {{7.0, -8.0, 1.0}, {-8.0, 16.0, -8.0}, {1.0, -8.0, 7.0}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(k.at(i, j) == doctest::Approx(expected[i][j] / 3.0).epsilon(1e-14));
}

TEST_CASE("stiffness scales as 1/h") {
    auto ref = assemble_weighted_stiffness(*unit_space(1), one);
    auto space_h = FeSpace::create(build_mesh(0.0, 0.25, 1));
    auto k = assemble_weighted_stiffness(*space_h, one);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(k.at(i, j) == doctest::Approx(4.0 * ref.at(i, j)).epsilon(1e-13));
}

TEST_CASE("constants are in the stiffness null space before elimination") {
    auto space = unit_space(6);
    auto k = assemble_weighted_stiffness(*space, one);
    std::vector<double> ones(space->n_dofs(), 1.0);
    auto r = k.matvec(ones);
    for (double v : r) CHECK(std::abs(v) <= 1e-13);
}

TEST_CASE("load vector examples") {
    auto space = unit_space(1);
    auto zero = assemble_load(*space, [](double) { return 0.0; });
    for (double v : zero) CHECK(v == 0.0);

    auto f1 = assemble_load(*space, one);
    CHECK(f1[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(f1[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(f1[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

    // f = midpoint bump reproduces the middle column of the mass matrix
    auto bump = assemble_load(*space, [](double x) { return 4.0 * x * (1.0 - x); });
    auto m = assemble_weighted_mass(*space, one, false);
    for (int i = 0; i < 3; ++i) CHECK(bump[i] == doctest::Approx(m.at(i, 1)).epsilon(1e-13));
}

TEST_CASE("non-finite weight is rejected") {
    auto space = unit_space(2);
    auto bad = [](double x) { return x > 0.4 ? std::numeric_limits<double>::quiet_NaN() : 1.0; };
    CHECK_THROWS_AS(static_cast<void>(assemble_weighted_mass(*space, bad, false)),
                    NonFiniteWeightError);
    CHECK_THROWS_AS(static_cast<void>(assemble_weighted_stiffness(*space, bad)),
                    NonFiniteWeightError);
    CHECK_THROWS_AS(static_cast<void>(assemble_load(*space, bad)), NonFiniteWeightError);
}

TEST_CASE("mass row sums: consistent equals lumped for unit weight") {
    auto space = unit_space(9);
    auto mc = assemble_weighted_mass(*space, one, false);
    auto ml = assemble_weighted_mass(*space, one, true);
    const int n = space->n_dofs();
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j) row += mc.at(i, j);
        CHECK(row == doctest::Approx(ml.at(i, i)).epsilon(1e-13));
        total += row;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));  // domain length
}

TEST_CASE("apply_dirichlet pins boundary rows") {
    auto space = unit_space(4);
    auto a = BandedSymMatrix::identity(space->n_dofs());
    std::vector<double> rhs(space->n_dofs(), 2.0);
    apply_dirichlet(*space, a, rhs);
    CHECK(a.at(0, 0) == 1.0);
    CHECK(rhs.front() == 0.0);
    CHECK(rhs.back() == 0.0);
    CHECK(rhs[1] == 2.0);

    std::vector<double> zero(space->n_dofs(), 0.0);
    auto k = assemble_weighted_stiffness(*space, one);
    apply_dirichlet(*space, k, zero);
    for (double v : zero) CHECK(v == 0.0);
}

TEST_CASE("Poisson solve against the analytic solution") {
    // -u'' = pi^2 sin(pi x), u = sin(pi x); H1 error should drop at O(h^2)
    std::vector<double> hs, errs;
    for (int n : {8, 16, 32, 64}) {
        auto space = unit_space(n);
        auto k = assemble_weighted_stiffness(*space, one);
        auto rhs = assemble_load(*space, [](double x) { return kPi * kPi * std::sin(kPi * x); });
        apply_dirichlet(*space, k, rhs);
        FeFunction u{space, factorize(k, true).solve(rhs)};

        const auto& q = error_quadrature();
        double semisq = 0.0;
        const auto& mesh = space->mesh();
        for (int e = 0; e < mesh.n_elements(); ++e) {
            const double xl = mesh.element_left(e), h = mesh.element_length(e);
            for (size_t qp = 0; qp < q.points.size(); ++qp) {
                const double x = xl + h * q.points[qp];
                const double d = u.evaluate_local_derivative(e, q.points[qp]) -
                                 kPi * std::cos(kPi * x);
                semisq += h * q.weights[qp] * d * d;
            }
        }
        hs.push_back(1.0 / n);
        errs.push_back(std::sqrt(semisq));
        // nodal values stay close to the analytic solution
        for (int i = 0; i < space->n_dofs(); ++i)
            CHECK(std::abs(u.dofs[i] - std::sin(kPi * space->dof_coords()[i])) < 0.5 / (n * n));
    }
    double slope_sum = 0.0;
    for (size_t i = 1; i < hs.size(); ++i)
        slope_sum += std::log(errs[i - 1] / errs[i]) / std::log(hs[i - 1] / hs[i]);
    CHECK(slope_sum / 3.0 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("assembled matrices are structurally symmetric") {
    auto space = unit_space(7);
    auto w = [](double x) { return 1.0 + 0.5 * std::sin(7.0 * x); };
    auto m = assemble_weighted_mass(*space, w, false);
    auto k = assemble_weighted_stiffness(*space, w);
    for (int i = 0; i < space->n_dofs(); ++i)
        for (int j = 0; j < space->n_dofs(); ++j) {
            CHECK(m.at(i, j) == m.at(j, i));
            CHECK(k.at(i, j) == k.at(j, i));
        }
}

TEST_CASE("unit-weight stiffness is PSD with a one-dimensional null space") {
    auto space = unit_space(5);
    auto k = assemble_weighted_stiffness(*space, one);
    const double lo = min_eig_lower_bound(k);
    CHECK(lo >= -1e-10);
    CHECK(eigenvalues_below(k, 1e-8).value() == 1);   // exactly the constant mode
    CHECK(eigenvalues_below(k, -1e-8).value() == 0);
}
