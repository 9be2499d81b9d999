#pragma once

#include <array>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "tmwave/fe_space.hpp"

namespace tmwave {

struct Interval {
    double left = 0.0;
    double right = 1.0;
    [[nodiscard]] double length() const { return right - left; }
};

using SpaceTimeFn = std::function<double(double, double)>;

/// Material fields a semi-discrete form can be weighted by. gain_loss is
/// the first-order weight d/dt(1/kappa) = -kappa_t / kappa^2 arising
/// when the conservative equation is expanded.
enum class CoefficientField { rho, kappa, inv_rho, inv_kappa, gain_loss, sigma };

constexpr int kNumCoefficientFields = 6;
const char* to_string(CoefficientField f);

/// Affine-in-time decomposition of a weight:
///   weight(x, t) = static_part(x) + modulation(t) * modulated_part(x).
/// Matrices assembled from such weights split into a pair of
/// time-independent matrices that need only be computed once.
struct SeparableWeight {
    SpatialFn static_part;
    SpatialFn modulated_part;
    std::function<double(double)> modulation;
};

/// Which fields weight the mass, stiffness and (optional) first-order
/// damping/gain forms of the semi-discrete system a model is meant to
/// be solved with.
struct SemiDiscreteForm {
    CoefficientField mass = CoefficientField::inv_kappa;
    CoefficientField stiffness = CoefficientField::inv_rho;
    std::optional<CoefficientField> damping;
};

/// Smooth localized modulation: rho = 1 + alpha_rho f(x) g(t) and
/// kappa = 1 + alpha_kappa f(x) g(t) with the Gaussian profile
/// f(x) = exp(-(x-center)^2 / (2 width^2)) / 2 and g(t) = sin(2 pi t);
/// optionally a gain/loss coefficient sigma = beta_sigma f(x) g(t).
struct GaussianModulationParams {
    double alpha_rho = 0.3;
    double alpha_kappa = 0.5;
    double beta_sigma = 0.0;
    double center = 0.5;
    double width = 0.2;
};

/// Uniform chain of resonators of the given length separated by gaps,
/// with reciprocal-affine time modulation inside each resonator:
///   rho = rho_r / (1 + alpha_rho cos(omega_rho t)),
///   kappa = kappa_r / (1 + alpha_kappa cos(omega_kappa t)),
/// and the static unit background outside.
struct ResonatorChainParams {
    int count = 50;
    double first_left = 0.0;
    double length = 1.0;
    double gap = 1.0;
    double rho_r = 0.1;
    double kappa_r = 0.1;
    double alpha_rho = 0.2;
    double alpha_kappa = 0.4;
    double omega_rho = 6.283185307179586;
    double omega_kappa = 6.283185307179586;

    [[nodiscard]] double chain_right() const {
        return first_left + count * length + (count - 1) * gap;
    }
};

/// Caller-supplied coefficient fields for manufactured-solution tests.
/// dt_kappa must be the analytic time derivative; there is no internal
/// differentiation, so the oracle stays independent of the code under
/// test.
struct ManufacturedCoefficients {
    SpaceTimeFn rho;
    SpaceTimeFn kappa;
    SpaceTimeFn dt_kappa;  // may be null; gain_loss() then throws
    SpaceTimeFn sigma;     // may be null; treated as zero
    SemiDiscreteForm form{CoefficientField::inv_kappa, CoefficientField::inv_rho, std::nullopt};
    std::vector<std::pair<CoefficientField, SeparableWeight>> declared_separable;
};

/// Evaluable space-time material model. Models are immutable after
/// construction and freely shareable across threads; the constructor
/// verifies positivity of rho and kappa on a sample grid and records
/// the observed bounds of 1/rho and 1/kappa.
class CoefficientModel {
public:
    static CoefficientModel constant(double rho0, double kappa0, Interval domain);
    static CoefficientModel gaussian_modulation(const GaussianModulationParams& p, Interval domain);
    static CoefficientModel resonator_chain(const ResonatorChainParams& p, Interval domain);
    static CoefficientModel manufactured(ManufacturedCoefficients m, Interval domain);

    [[nodiscard]] double rho(double x, double t) const { return rho_(x, t); }
    [[nodiscard]] double kappa(double x, double t) const { return kappa_(x, t); }
    [[nodiscard]] double inv_rho(double x, double t) const { return 1.0 / rho_(x, t); }
    [[nodiscard]] double inv_kappa(double x, double t) const { return 1.0 / kappa_(x, t); }
    /// d/dt (1/kappa) = -kappa_t / kappa^2; negative values amplify wave
    /// energy, positive values dampen it.
    [[nodiscard]] double gain_loss(double x, double t) const;
    [[nodiscard]] double sigma(double x, double t) const { return sigma_ ? sigma_(x, t) : 0.0; }

    [[nodiscard]] double field(CoefficientField f, double x, double t) const;
    [[nodiscard]] std::optional<SeparableWeight> separable(CoefficientField f) const;

    [[nodiscard]] const SemiDiscreteForm& form() const noexcept { return form_; }
    [[nodiscard]] Interval domain() const noexcept { return domain_; }
    [[nodiscard]] double background_speed() const noexcept { return background_speed_; }
    /// Observed [min, max] of {1/rho, 1/kappa} over the validation grid.
    [[nodiscard]] std::pair<double, double> inv_coefficient_bounds() const noexcept {
        return bounds_;
    }
    /// Span of the resonator chain, when the model has one.
    [[nodiscard]] std::optional<Interval> chain_interval() const noexcept { return chain_; }
    /// Material interfaces that must coincide with mesh vertices.
    [[nodiscard]] const std::vector<double>& interface_vertices() const noexcept {
        return interfaces_;
    }

private:
    CoefficientModel() = default;
    void validate_and_record_bounds(std::span<const double> extra_x);

    SpaceTimeFn rho_;
    SpaceTimeFn kappa_;
    SpaceTimeFn dt_kappa_;  // analytic; null only for manufactured models without one
    SpaceTimeFn sigma_;
    std::array<std::optional<SeparableWeight>, kNumCoefficientFields> separable_;
    SemiDiscreteForm form_;
    Interval domain_;
    double background_speed_ = 1.0;
    std::pair<double, double> bounds_{1.0, 1.0};
    std::optional<Interval> chain_;
    std::vector<double> interfaces_;
};

}  // namespace tmwave
