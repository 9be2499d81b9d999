#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "tmwave/assembly.hpp"
#include "tmwave/banded.hpp"
#include "tmwave/coefficients.hpp"
#include "tmwave/fe_space.hpp"

namespace tmwave {

/// Three-level leapfrog state: u_prev at t - dt, u_curr at t = step_index * dt.
struct WaveState {
    std::vector<double> u_prev;
    std::vector<double> u_curr;
    int step_index = 0;
    double t_curr = 0.0;
    double dt = 0.0;
};

/// One assembled time-dependent form. A separable weight keeps the pair
/// of time-independent matrices and combines them per query; otherwise
/// the form is reassembled through a closure. Either way at(t) reuses an
/// internal buffer, so the returned reference is invalidated by the next
/// call.
class FormCache {
public:
    static FormCache separable_form(BandedSymMatrix static_part, BandedSymMatrix modulated_part,
                                    std::function<double(double)> modulation);
    static FormCache general_form(std::function<BandedSymMatrix(double)> assemble);
    static FormCache constant_form(BandedSymMatrix fixed);

    const BandedSymMatrix& at(double t);
    /// True when at(t) is independent of t (factorizations can be reused).
    [[nodiscard]] bool is_static() const noexcept { return static_; }

private:
    FormCache() = default;
    bool separable_ = false;
    bool static_ = false;
    std::optional<BandedSymMatrix> part_static_;
    std::optional<BandedSymMatrix> part_modulated_;
    std::function<double(double)> modulation_;
    std::function<BandedSymMatrix(double)> assemble_;
    std::optional<BandedSymMatrix> buffer_;
    double buffer_t_ = 0.0;
    bool buffer_valid_ = false;
};

/// The assembled operators of the semi-discrete system
///   M(t) u'' + S(t) u' + K(t) u = F(t),
/// built from a coefficient model's form selection. Separable weights
/// take the cached path so the matrices are assembled only once.
class MatrixCache {
public:
    MatrixCache(std::shared_ptr<const FeSpace> space, const CoefficientModel& model,
                const SemiDiscreteForm& form, bool lumped_mass);

    /// Low-level constructor for model-problem tests: raw providers, no
    /// Dirichlet bookkeeping unless dirichlet dofs are given.
    MatrixCache(FormCache mass, FormCache stiffness, std::optional<FormCache> damping,
                bool mass_is_diagonal);

    const BandedSymMatrix& mass(double t) { return mass_.at(t); }
    const BandedSymMatrix& stiffness(double t) { return stiffness_.at(t); }
    /// nullptr when the system has no first-order term.
    const BandedSymMatrix* damping(double t);

    [[nodiscard]] bool mass_diagonal() const noexcept { return mass_diagonal_; }
    [[nodiscard]] bool has_damping() const noexcept { return damping_.has_value(); }

    /// Factorization of M(t); cached when the mass form is static.
    const BandedLdlt& mass_factorization(double t);

private:
    FormCache mass_;
    FormCache stiffness_;
    std::optional<FormCache> damping_;
    bool mass_diagonal_ = false;
    std::optional<BandedLdlt> mass_factor_;
    bool mass_factor_valid_ = false;
    double mass_factor_t_ = 0.0;
};

/// Right-hand-side provider: F(t) with Dirichlet entries already zeroed.
using LoadProvider = std::function<std::vector<double>(double)>;

/// Second-order Taylor start: u^0 interpolates u0, and
/// u^1 = u^0 + dt v^0 + dt^2/2 a^0 with M(0) a^0 = F(0) - K(0) u^0 - S(0) v^0.
WaveState startup(const std::shared_ptr<const FeSpace>& space, MatrixCache& cache,
                  const SpatialFn& u0, const SpatialFn& v0, const LoadProvider& load, double dt);

/// Amplitude guard: a step whose result exceeds this max-norm throws
/// DivergedError, normally signalling a CFL violation. Scenarios with
/// genuine exponential amplification may raise it.
inline constexpr double kDefaultDivergenceGuard = 1e12;

/// u^{n+1} = 2u^n - u^{n-1} - dt^2 M(t^n)^{-1} (K(t^n) u^n - F(t^n)).
/// Requires no damping form (or an identically zero one).
void leapfrog_step(WaveState& state, MatrixCache& cache, const LoadProvider& load = {},
                   double divergence_guard = kDefaultDivergenceGuard);

/// Leapfrog with the first-order term treated by a centered average:
/// (M + dt/2 S) u^{n+1} = 2M u^n - (M - dt/2 S) u^{n-1} - dt^2 (K u^n - F).
void lfcn_step(WaveState& state, MatrixCache& cache, const LoadProvider& load = {},
               double divergence_guard = kDefaultDivergenceGuard);

struct RunOptions {
    std::vector<double> snapshot_times;
    bool lumped_mass = true;
    double divergence_guard = kDefaultDivergenceGuard;
    int energy_stride = 0;  // 0 disables the energy series
    /// Called at t = 0 with u^0 and after every step with u^n.
    std::function<void(double, std::span<const double>)> observer;
};

struct Trajectory {
    std::vector<std::pair<double, FeFunction>> snapshots;
    std::vector<std::pair<double, double>> energy_series;
    int n_steps = 0;
};

/// Integrate the scenario from its initial data to time T with uniform
/// step dt (choose dt dividing T; snapshots are taken at the nearest
/// step). Dispatches to leapfrog or leapfrog/Crank-Nicolson depending on
/// the model's damping form.
Trajectory run(const std::shared_ptr<const FeSpace>& space, const CoefficientModel& model,
               const SpatialFn& u0, const SpatialFn& v0, const SpaceTimeFn& forcing, double dt,
               double T, const RunOptions& options = {});

/// CFL heuristic dt = cfl * (min dof spacing) / c_max with c_max the
/// sampled maximum of sqrt(kappa/rho) over the space-time grid. For the
/// degree-2 nodes the dof spacing is half the element length, which
/// keeps leapfrog comfortably inside its stability interval.
double stable_dt(const FeSpace& space, const CoefficientModel& model, double cfl = 0.5,
                 double t_horizon = 1.0, int n_time_samples = 33);

}  // namespace tmwave
