#include "tmwave/banded.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

namespace tmwave {

BandedSymMatrix::BandedSymMatrix(int n, int half_bandwidth)
    : n_(n), hb_(half_bandwidth), bands_(static_cast<size_t>(half_bandwidth + 1) * n, 0.0) {
    if (n < 1) throw DimensionMismatchError("BandedSymMatrix: n must be >= 1");
    if (half_bandwidth < 0 || half_bandwidth >= n)
        throw DimensionMismatchError("BandedSymMatrix: half_bandwidth must be in [0, n)");
}

BandedSymMatrix BandedSymMatrix::identity(int n) {
    BandedSymMatrix a(n, 0);
    for (int i = 0; i < n; ++i) a.band(0, i) = 1.0;
    return a;
}

double BandedSymMatrix::at(int i, int j) const {
    const int lo = std::min(i, j), hi = std::max(i, j);
    const int d = hi - lo;
    if (d > hb_) return 0.0;
    return band(d, lo);
}

void BandedSymMatrix::set(int i, int j, double v) {
    const int lo = std::min(i, j), hi = std::max(i, j);
    const int d = hi - lo;
    if (d > hb_) throw DimensionMismatchError("BandedSymMatrix::set outside band");
    band(d, lo) = v;
}

void BandedSymMatrix::add(int i, int j, double v) {
    const int lo = std::min(i, j), hi = std::max(i, j);
    const int d = hi - lo;
    if (d > hb_) throw DimensionMismatchError("BandedSymMatrix::add outside band");
    band(d, lo) += v;
}

void BandedSymMatrix::matvec(std::span<const double> x, std::span<double> y) const {
    if (static_cast<int>(x.size()) != n_ || static_cast<int>(y.size()) != n_)
        throw DimensionMismatchError("matvec: vector length does not match matrix size");
    // row-wise accumulation in ascending column order matches a dense
    // row-major product bit for bit
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        const int j0 = std::max(0, i - hb_);
        const int j1 = std::min(n_ - 1, i + hb_);
        for (int j = j0; j < i; ++j) s += band(i - j, j) * x[j];
        for (int j = i; j <= j1; ++j) s += band(j - i, i) * x[j];
        y[i] = s;
    }
}

std::vector<double> BandedSymMatrix::matvec(std::span<const double> x) const {
    std::vector<double> y(n_);
    matvec(x, y);
    return y;
}

double BandedSymMatrix::inf_norm() const {
    std::vector<double> row_sum(n_, 0.0);
    for (int i = 0; i < n_; ++i) row_sum[i] += std::abs(band(0, i));
    for (int d = 1; d <= hb_; ++d) {
        for (int i = 0; i + d < n_; ++i) {
            const double v = std::abs(band(d, i));
            row_sum[i] += v;
            row_sum[i + d] += v;
        }
    }
    return row_sum.empty() ? 0.0 : *std::max_element(row_sum.begin(), row_sum.end());
}

bool BandedSymMatrix::all_finite() const {
    for (double v : bands_)
        if (!std::isfinite(v)) return false;
    return true;
}

void BandedSymMatrix::set_zero() { std::fill(bands_.begin(), bands_.end(), 0.0); }

void BandedSymMatrix::assign_sum(const BandedSymMatrix& a, double s, const BandedSymMatrix& b) {
    if (a.n_ != b.n_) throw DimensionMismatchError("assign_sum: size mismatch");
    const int hb = std::max(a.hb_, b.hb_);
    n_ = a.n_;
    hb_ = hb;
    bands_.assign(static_cast<size_t>(hb + 1) * n_, 0.0);
    for (int d = 0; d <= a.hb_; ++d)
        for (int i = 0; i + d < n_; ++i) band(d, i) = a.band(d, i);
    for (int d = 0; d <= b.hb_; ++d)
        for (int i = 0; i + d < n_; ++i) band(d, i) += s * b.band(d, i);
}

void BandedSymMatrix::shift_diagonal(double s) {
    for (int i = 0; i < n_; ++i) band(0, i) += s;
}

namespace {

// Core LDL^T loop shared by factorize() and the inertia count. Returns
// false on pivot breakdown (|d_j| below breakdown_tol).
bool ldlt_kernel(const BandedSymMatrix& A, double shift, std::vector<double>& lower,
                 std::vector<double>& d, double breakdown_tol) {
    const int n = A.size();
    const int hb = A.half_bandwidth();
    lower.assign(static_cast<size_t>(hb + 1) * n, 0.0);
    d.assign(n, 0.0);
    auto lo = [&](int dd, int i) -> double& { return lower[static_cast<size_t>(dd) * n + i]; };

    for (int j = 0; j < n; ++j) {
        double dj = A.band(0, j) - shift;
        const int kmin = std::max(0, j - hb);
        for (int k = kmin; k < j; ++k) {
            const double ljk = lo(j - k, k);
            dj -= ljk * ljk * d[k];
        }
        if (std::abs(dj) <= breakdown_tol) return false;
        d[j] = dj;
        const int imax = std::min(n - 1, j + hb);
        for (int i = j + 1; i <= imax; ++i) {
            double v = (i - j <= hb) ? A.band(i - j, j) : 0.0;
            const int kmin2 = std::max(0, i - hb);
            for (int k = std::max(kmin, kmin2); k < j; ++k) v -= lo(i - k, k) * lo(j - k, k) * d[k];
            lo(i - j, j) = v / dj;
        }
    }
    return true;
}

}  // namespace

BandedLdlt factorize(const BandedSymMatrix& A, bool require_positive_definite) {
    if (!A.all_finite()) throw NonFiniteWeightError("factorize: matrix has non-finite entries");
    const double scale = std::max(A.inf_norm(), 1e-300);
    BandedLdlt f;
    f.n_ = A.size();
    f.hb_ = A.half_bandwidth();
    if (!ldlt_kernel(A, 0.0, f.lower_, f.d_, 1e-14 * scale))
        throw NotPositiveDefiniteError("factorize: zero pivot (matrix singular or ill-conditioned)");
    if (require_positive_definite) {
        for (double dj : f.d_)
            if (dj <= 1e-14 * scale)
                throw NotPositiveDefiniteError("factorize: non-positive pivot, matrix not SPD");
    }
    return f;
}

void BandedLdlt::solve_inplace(std::span<double> x) const {
    if (static_cast<int>(x.size()) != n_)
        throw DimensionMismatchError("solve: vector length does not match factorization size");
    auto lo = [&](int dd, int i) { return lower_[static_cast<size_t>(dd) * n_ + i]; };
    // forward substitution with unit-lower L
    for (int j = 0; j < n_; ++j) {
        const double xj = x[j];
        const int imax = std::min(n_ - 1, j + hb_);
        for (int i = j + 1; i <= imax; ++i) x[i] -= lo(i - j, j) * xj;
    }
    for (int i = 0; i < n_; ++i) x[i] /= d_[i];
    // back substitution with L^T
    for (int j = n_ - 1; j >= 0; --j) {
        double xj = x[j];
        const int imax = std::min(n_ - 1, j + hb_);
        for (int i = j + 1; i <= imax; ++i) xj -= lo(i - j, j) * x[i];
        x[j] = xj;
    }
}

std::vector<double> BandedLdlt::solve(std::span<const double> rhs) const {
    std::vector<double> x(rhs.begin(), rhs.end());
    solve_inplace(x);
    return x;
}

std::optional<int> eigenvalues_below(const BandedSymMatrix& A, double shift) {
    const double scale = std::max(A.inf_norm() + std::abs(shift), 1e-300);
    std::vector<double> lower, d;
    if (!ldlt_kernel(A, shift, lower, d, 1e-300 * scale)) return std::nullopt;
    int count = 0;
    for (double dj : d)
        if (dj < 0.0) ++count;
    return count;
}

double gershgorin_lower_bound(const BandedSymMatrix& A) {
    const int n = A.size();
    const int hb = A.half_bandwidth();
    std::vector<double> off(n, 0.0);
    for (int d = 1; d <= hb; ++d) {
        for (int i = 0; i + d < n; ++i) {
            const double v = std::abs(A.band(d, i));
            off[i] += v;
            off[i + d] += v;
        }
    }
    double bound = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) bound = std::min(bound, A.band(0, i) - off[i]);
    return bound;
}

double min_eig_lower_bound(const BandedSymMatrix& A) {
    const double scale = std::max(1.0, A.inf_norm());
    double lo = gershgorin_lower_bound(A);
    // lambda_min never exceeds the smallest diagonal entry.
    double hi = std::numeric_limits<double>::infinity();
    for (int i = 0; i < A.size(); ++i) hi = std::min(hi, A.band(0, i));

    const double tol = 1e-13 * scale;
    int guard = 0;
    while (hi - lo > tol && guard++ < 200) {
        double mid = 0.5 * (lo + hi);
        auto below = eigenvalues_below(A, mid);
        int nudges = 0;
        while (!below && nudges++ < 4) {
            mid += (hi - lo) * 1e-7;
            below = eigenvalues_below(A, mid);
        }
        if (!below) {
            hi = mid;  // treat persistent breakdown as "eigenvalue at mid"
            continue;
        }
        if (*below >= 1)
            hi = mid;
        else
            lo = mid;
    }
    return lo - 1e-12 * scale;
}

}  // namespace tmwave
