#include "tmwave/stepping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "tmwave/analysis.hpp"
#include "tmwave/errors.hpp"

namespace tmwave {

namespace {

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

FormCache FormCache::separable_form(BandedSymMatrix static_part, BandedSymMatrix modulated_part,
                                    std::function<double(double)> modulation) {
    FormCache f;
    f.separable_ = true;
    f.static_ = modulated_part.inf_norm() == 0.0;
    f.part_static_ = std::move(static_part);
    f.part_modulated_ = std::move(modulated_part);
    f.modulation_ = std::move(modulation);
    return f;
}

FormCache FormCache::general_form(std::function<BandedSymMatrix(double)> assemble) {
    FormCache f;
    f.assemble_ = std::move(assemble);
    return f;
}

FormCache FormCache::constant_form(BandedSymMatrix fixed) {
    FormCache f;
    f.separable_ = true;
    f.static_ = true;
    f.part_static_ = std::move(fixed);
    f.part_modulated_ = BandedSymMatrix(f.part_static_->size(), 0);
    f.modulation_ = [](double) { return 0.0; };
    return f;
}

const BandedSymMatrix& FormCache::at(double t) {
    if (buffer_valid_ && (static_ || buffer_t_ == t)) return *buffer_;
    if (separable_) {
        const double g = static_ ? 0.0 : modulation_(t);
        if (!buffer_) buffer_.emplace(part_static_->size(), part_static_->half_bandwidth());
        buffer_->assign_sum(*part_static_, g, *part_modulated_);
    } else {
        buffer_ = assemble_(t);
    }
    buffer_t_ = t;
    buffer_valid_ = true;
    return *buffer_;
}

namespace {

FormCache make_form_cache(const std::shared_ptr<const FeSpace>& space,
                          const CoefficientModel& model, CoefficientField field, bool is_mass,
                          bool lumped, double pin) {
    const bool stiffness = !is_mass;
    if (auto sep = model.separable(field)) {
        auto assemble_part = [&](const SpatialFn& w, double part_pin) {
            BandedSymMatrix a = stiffness ? assemble_weighted_stiffness(*space, w)
                                          : assemble_weighted_mass(*space, w, lumped);
            apply_dirichlet(*space, a, part_pin);
            return a;
        };
        return FormCache::separable_form(assemble_part(sep->static_part, pin),
                                         assemble_part(sep->modulated_part, 0.0),
                                         sep->modulation);
    }
    const CoefficientModel* m = &model;
    return FormCache::general_form([space, m, field, stiffness, lumped, pin](double t) {
        auto w = [m, field, t](double x) { return m->field(field, x, t); };
        BandedSymMatrix a = stiffness ? assemble_weighted_stiffness(*space, w)
                                      : assemble_weighted_mass(*space, w, lumped);
        apply_dirichlet(*space, a, pin);
        return a;
    });
}

}  // namespace

MatrixCache::MatrixCache(std::shared_ptr<const FeSpace> space, const CoefficientModel& model,
                         const SemiDiscreteForm& form, bool lumped_mass)
    : mass_(make_form_cache(space, model, form.mass, true, lumped_mass, 1.0)),
      stiffness_(make_form_cache(space, model, form.stiffness, false, false, 1.0)),
      mass_diagonal_(lumped_mass) {
    if (form.damping)
        damping_ = make_form_cache(space, model, *form.damping, true, lumped_mass, 0.0);
}

MatrixCache::MatrixCache(FormCache mass, FormCache stiffness, std::optional<FormCache> damping,
                         bool mass_is_diagonal)
    : mass_(std::move(mass)),
      stiffness_(std::move(stiffness)),
      damping_(std::move(damping)),
      mass_diagonal_(mass_is_diagonal) {}

const BandedSymMatrix* MatrixCache::damping(double t) {
    if (!damping_) return nullptr;
    return &damping_->at(t);
}

const BandedLdlt& MatrixCache::mass_factorization(double t) {
    if (mass_factor_valid_ && (mass_.is_static() || mass_factor_t_ == t)) return *mass_factor_;
    mass_factor_ = factorize(mass_.at(t));
    mass_factor_t_ = t;
    mass_factor_valid_ = true;
    return *mass_factor_;
}

namespace {

// x = M(t)^-1 b via the diagonal or the factorized path.
void mass_solve(MatrixCache& cache, double t, std::vector<double>& b) {
    if (cache.mass_diagonal()) {
        const BandedSymMatrix& m = cache.mass(t);
        for (int i = 0; i < m.size(); ++i) b[i] /= m.band(0, i);
    } else {
        cache.mass_factorization(t).solve_inplace(b);
    }
}

void advance(WaveState& state, std::vector<double>&& u_next) {
    state.u_prev = std::move(state.u_curr);
    state.u_curr = std::move(u_next);
    ++state.step_index;
    state.t_curr = state.step_index * state.dt;
}

}  // namespace

WaveState startup(const std::shared_ptr<const FeSpace>& space, MatrixCache& cache,
                  const SpatialFn& u0, const SpatialFn& v0, const LoadProvider& load, double dt) {
    if (!(dt > 0.0)) throw ValidationError("startup: dt must be positive");
    FeFunction uh0 = interpolate(space, u0, true);
    FeFunction vh0 = interpolate(space, v0, true);

    std::vector<double> rhs = load ? load(0.0) : std::vector<double>(space->n_dofs(), 0.0);
    std::vector<double> ku(space->n_dofs());
    cache.stiffness(0.0).matvec(uh0.dofs, ku);
    for (int i = 0; i < space->n_dofs(); ++i) rhs[i] -= ku[i];
    if (const BandedSymMatrix* s = cache.damping(0.0)) {
        std::vector<double> sv(space->n_dofs());
        s->matvec(vh0.dofs, sv);
        for (int i = 0; i < space->n_dofs(); ++i) rhs[i] -= sv[i];
    }
    mass_solve(cache, 0.0, rhs);
    zero_dirichlet(*space, rhs);

    WaveState state;
    state.dt = dt;
    state.u_prev = uh0.dofs;
    state.u_curr.resize(space->n_dofs());
    for (int i = 0; i < space->n_dofs(); ++i)
        state.u_curr[i] = uh0.dofs[i] + dt * vh0.dofs[i] + 0.5 * dt * dt * rhs[i];
    zero_dirichlet(*space, state.u_curr);
    state.step_index = 1;
    state.t_curr = dt;
    return state;
}

void leapfrog_step(WaveState& state, MatrixCache& cache, const LoadProvider& load,
                   double divergence_guard) {
    const double t = state.t_curr;
    const double dt = state.dt;
    const int n = static_cast<int>(state.u_curr.size());

    std::vector<double> r(n);
    cache.stiffness(t).matvec(state.u_curr, r);
    if (load) {
        const std::vector<double> f = load(t);
        for (int i = 0; i < n; ++i) r[i] -= f[i];
    }
    mass_solve(cache, t, r);

    std::vector<double> u_next(n);
    for (int i = 0; i < n; ++i)
        u_next[i] = 2.0 * state.u_curr[i] - state.u_prev[i] - dt * dt * r[i];

    if (max_abs(u_next) > divergence_guard)
        throw DivergedError("leapfrog_step: amplitude guard exceeded (CFL violation?)",
                            state.step_index + 1);
    advance(state, std::move(u_next));
}

void lfcn_step(WaveState& state, MatrixCache& cache, const LoadProvider& load,
               double divergence_guard) {
    const BandedSymMatrix* damping = cache.damping(state.t_curr);
    if (damping == nullptr) {
        leapfrog_step(state, cache, load, divergence_guard);
        return;
    }
    const double t = state.t_curr;
    const double dt = state.dt;
    const int n = static_cast<int>(state.u_curr.size());

    // rhs = 2 M u - (M - dt/2 S) u_prev - dt^2 (K u - F)
    std::vector<double> rhs(n), tmp(n);
    cache.stiffness(t).matvec(state.u_curr, rhs);
    if (load) {
        const std::vector<double> f = load(t);
        for (int i = 0; i < n; ++i) rhs[i] -= f[i];
    }
    for (int i = 0; i < n; ++i) rhs[i] *= -dt * dt;

    const BandedSymMatrix& m = cache.mass(t);
    m.matvec(state.u_curr, tmp);
    for (int i = 0; i < n; ++i) rhs[i] += 2.0 * tmp[i];
    m.matvec(state.u_prev, tmp);
    for (int i = 0; i < n; ++i) rhs[i] -= tmp[i];
    damping->matvec(state.u_prev, tmp);
    for (int i = 0; i < n; ++i) rhs[i] += 0.5 * dt * tmp[i];

    std::vector<double> u_next;
    if (cache.mass_diagonal() && damping->half_bandwidth() == 0) {
        u_next = std::move(rhs);
        for (int i = 0; i < n; ++i) {
            const double lhs = m.band(0, i) + 0.5 * dt * damping->band(0, i);
            if (!(lhs > 0.0))
                throw NotPositiveDefiniteError(
                    "lfcn_step: M + dt/2 S has a non-positive diagonal entry "
                    "(dt too large for the gain strength)");
            u_next[i] /= lhs;
        }
    } else {
        BandedSymMatrix lhs(n, std::max(m.half_bandwidth(), damping->half_bandwidth()));
        lhs.assign_sum(m, 0.5 * dt, *damping);
        u_next = factorize(lhs, true).solve(rhs);
    }

    if (max_abs(u_next) > divergence_guard)
        throw DivergedError("lfcn_step: amplitude guard exceeded (CFL violation?)",
                            state.step_index + 1);
    advance(state, std::move(u_next));
}

Trajectory run(const std::shared_ptr<const FeSpace>& space, const CoefficientModel& model,
               const SpatialFn& u0, const SpatialFn& v0, const SpaceTimeFn& forcing, double dt,
               double T, const RunOptions& options) {
    Trajectory traj;
    const int n_steps = T <= 0.0 ? 0 : static_cast<int>(std::llround(T / dt));

    // requested snapshot times -> nearest step index; states captured by
    // index, snapshots returned in request order afterwards
    std::vector<int> snap_idx;
    std::map<int, std::vector<double>> captured;
    for (double ts : options.snapshot_times) {
        const int idx =
            n_steps == 0 ? 0 : std::clamp(static_cast<int>(std::llround(ts / dt)), 0, n_steps);
        snap_idx.push_back(idx);
        captured.emplace(idx, std::vector<double>{});
    }
    auto emit = [&](int idx, const std::vector<double>& dofs) {
        auto it = captured.find(idx);
        if (it != captured.end() && it->second.empty()) it->second = dofs;
    };
    auto collect = [&]() {
        for (size_t i = 0; i < snap_idx.size(); ++i) {
            const int idx = snap_idx[i];
            traj.snapshots.emplace_back(n_steps == 0 ? 0.0 : idx * dt,
                                        FeFunction{space, captured.at(idx)});
        }
    };

    FeFunction initial = interpolate(space, u0, true);
    if (options.observer) options.observer(0.0, initial.dofs);
    emit(0, initial.dofs);
    if (n_steps == 0) {
        collect();
        return traj;
    }

    MatrixCache cache(space, model, model.form(), options.lumped_mass);
    LoadProvider load;
    if (forcing) {
        load = [space, &forcing](double t) {
            std::vector<double> f =
                assemble_load(*space, [&forcing, t](double x) { return forcing(x, t); });
            zero_dirichlet(*space, f);
            return f;
        };
    }

    WaveState state = startup(space, cache, u0, v0, load, dt);
    const bool damped = cache.has_damping();
    auto record = [&](const WaveState& s) {
        if (options.observer) options.observer(s.t_curr, s.u_curr);
        if (options.energy_stride > 0 &&
            (s.step_index % options.energy_stride == 0 || s.step_index == n_steps))
            traj.energy_series.emplace_back(s.t_curr, energy(s, model, *space));
        emit(s.step_index, s.u_curr);
    };
    record(state);

    while (state.step_index < n_steps) {
        if (damped)
            lfcn_step(state, cache, load, options.divergence_guard);
        else
            leapfrog_step(state, cache, load, options.divergence_guard);
        record(state);
    }
    collect();
    traj.n_steps = n_steps;
    return traj;
}

double stable_dt(const FeSpace& space, const CoefficientModel& model, double cfl, double t_horizon,
                 int n_time_samples) {
    const auto coords = space.dof_coords();
    double spacing = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < coords.size(); ++i)
        spacing = std::min(spacing, coords[i + 1] - coords[i]);

    double c_max = 0.0;
    for (int j = 0; j < n_time_samples; ++j) {
        const double t = t_horizon * j / std::max(1, n_time_samples - 1);
        for (double x : coords)
            c_max = std::max(c_max, std::sqrt(model.kappa(x, t) / model.rho(x, t)));
    }
    return cfl * spacing / c_max;
}

}  // namespace tmwave
