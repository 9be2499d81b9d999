#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tmwave/errors.hpp"

namespace tmwave {

/// Symmetric banded matrix storing only the diagonal and the lower
/// sub-diagonals.
///
/// Storage layout: band d (d = 0..half_bandwidth) holds the entries
/// A(i+d, i) for i = 0..n-d-1, so symmetry holds by construction.
/// Degree-2 elements in 1D assemble into half_bandwidth 2; the type is
/// general so it can back other discretizations as well.
class BandedSymMatrix {
public:
    BandedSymMatrix(int n, int half_bandwidth);

    static BandedSymMatrix identity(int n);

    [[nodiscard]] int size() const noexcept { return n_; }
    [[nodiscard]] int half_bandwidth() const noexcept { return hb_; }

    /// Read A(i, j); returns 0 outside the band.
    [[nodiscard]] double at(int i, int j) const;

    /// Set A(i, j) = A(j, i) = v. Requires |i - j| <= half_bandwidth.
    void set(int i, int j, double v);

    /// A(i, j) += v (symmetric). Requires |i - j| <= half_bandwidth.
    void add(int i, int j, double v);

    /// Direct band access: entry A(i + d, i) of sub-diagonal d.
    [[nodiscard]] double band(int d, int i) const { return bands_[static_cast<size_t>(d) * n_ + i]; }
    double& band(int d, int i) { return bands_[static_cast<size_t>(d) * n_ + i]; }

    /// y = A x.
    void matvec(std::span<const double> x, std::span<double> y) const;
    [[nodiscard]] std::vector<double> matvec(std::span<const double> x) const;

    /// Max absolute row sum.
    [[nodiscard]] double inf_norm() const;

    [[nodiscard]] bool all_finite() const;

    void set_zero();

    /// this = a + s * b. Dimensions must match; bandwidth becomes the
    /// wider of the two. Reuses existing storage when it already fits.
    void assign_sum(const BandedSymMatrix& a, double s, const BandedSymMatrix& b);

    /// this += s * (identity).
    void shift_diagonal(double s);

private:
    int n_;
    int hb_;
    std::vector<double> bands_;
};

/// LDL^T factorization of a banded symmetric matrix (no pivoting).
///
/// The L factor is unit lower triangular with the same bandwidth as the
/// input. solve() applies L^-1, D^-1, L^-T in sequence.
class BandedLdlt {
public:
    void solve_inplace(std::span<double> x) const;
    [[nodiscard]] std::vector<double> solve(std::span<const double> rhs) const;

    [[nodiscard]] int size() const noexcept { return n_; }
    [[nodiscard]] std::span<const double> pivots() const noexcept { return d_; }

private:
    friend BandedLdlt factorize(const BandedSymMatrix&, bool);
    int n_ = 0;
    int hb_ = 0;
    std::vector<double> lower_;  // strict lower bands, layout as BandedSymMatrix
    std::vector<double> d_;
};

/// Factorize A = L D L^T.
///
/// With require_positive_definite the factorization doubles as an SPD
/// test: any pivot <= tol * ||A||_inf throws NotPositiveDefiniteError.
/// Without it only a near-zero pivot (breakdown) throws.
BandedLdlt factorize(const BandedSymMatrix& A, bool require_positive_definite = false);

/// Number of negative pivots of A - shift*I, i.e. the number of
/// eigenvalues below `shift` (Sylvester's law). nullopt on pivot
/// breakdown (shift essentially equal to an eigenvalue of a leading
/// principal submatrix).
std::optional<int> eigenvalues_below(const BandedSymMatrix& A, double shift);

/// Gershgorin lower bound min_i (a_ii - sum_{j != i} |a_ij|).
double gershgorin_lower_bound(const BandedSymMatrix& A);

/// Guaranteed lower bound on the smallest eigenvalue.
///
/// Starts from the Gershgorin bound and tightens it by bisection on the
/// LDL^T inertia count, so the result never crosses the true lambda_min
/// while staying within roundoff of it. Cost is O(bandwidth^2 * n) per
/// bisection step; no dense eigensolver is involved.
double min_eig_lower_bound(const BandedSymMatrix& A);

}  // namespace tmwave
