#include "tmwave/coefficients.hpp"

#include <cmath>

#include "tmwave/errors.hpp"

namespace tmwave {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

int field_index(CoefficientField f) { return static_cast<int>(f); }

}  // namespace

const char* to_string(CoefficientField f) {
    switch (f) {
        case CoefficientField::rho: return "rho";
        case CoefficientField::kappa: return "kappa";
        case CoefficientField::inv_rho: return "inv_rho";
        case CoefficientField::inv_kappa: return "inv_kappa";
        case CoefficientField::gain_loss: return "gain_loss";
        case CoefficientField::sigma: return "sigma";
    }
    return "?";
}

double CoefficientModel::gain_loss(double x, double t) const {
    if (!dt_kappa_)
        throw MissingDerivativeError(
            "gain_loss: manufactured model was constructed without dt_kappa");
    const double k = kappa_(x, t);
    return -dt_kappa_(x, t) / (k * k);
}

double CoefficientModel::field(CoefficientField f, double x, double t) const {
    switch (f) {
        case CoefficientField::rho: return rho(x, t);
        case CoefficientField::kappa: return kappa(x, t);
        case CoefficientField::inv_rho: return inv_rho(x, t);
        case CoefficientField::inv_kappa: return inv_kappa(x, t);
        case CoefficientField::gain_loss: return gain_loss(x, t);
        case CoefficientField::sigma: return sigma(x, t);
    }
    throw Error("field: unknown coefficient field");
}

std::optional<SeparableWeight> CoefficientModel::separable(CoefficientField f) const {
    return separable_[field_index(f)];
}

void CoefficientModel::validate_and_record_bounds(std::span<const double> extra_x) {
    std::vector<double> xs;
    const int nx = 201, nt = 33;
    xs.reserve(nx + extra_x.size());
    for (int i = 0; i < nx; ++i)
        xs.push_back(domain_.left + domain_.length() * i / (nx - 1));
    xs.insert(xs.end(), extra_x.begin(), extra_x.end());

    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double x : xs) {
        for (int j = 0; j < nt; ++j) {
            const double t = 2.0 * j / (nt - 1);
            const double r = rho_(x, t), k = kappa_(x, t);
            if (!(r > 0.0) || !(k > 0.0) || !std::isfinite(r) || !std::isfinite(k))
                throw ValidationError("coefficient model: rho/kappa must be positive and finite");
            lo = std::min({lo, 1.0 / r, 1.0 / k});
            hi = std::max({hi, 1.0 / r, 1.0 / k});
        }
    }
    bounds_ = {lo, hi};
}

CoefficientModel CoefficientModel::constant(double rho0, double kappa0, Interval domain) {
    CoefficientModel m;
    m.domain_ = domain;
    m.rho_ = [rho0](double, double) { return rho0; };
    m.kappa_ = [kappa0](double, double) { return kappa0; };
    m.dt_kappa_ = [](double, double) { return 0.0; };
    auto zero_mod = [](double) { return 0.0; };
    auto zero_fn = [](double) { return 0.0; };
    auto sep_const = [&](double c) {
        return SeparableWeight{[c](double) { return c; }, zero_fn, zero_mod};
    };
    m.separable_[field_index(CoefficientField::rho)] = sep_const(rho0);
    m.separable_[field_index(CoefficientField::kappa)] = sep_const(kappa0);
    m.separable_[field_index(CoefficientField::inv_rho)] = sep_const(1.0 / rho0);
    m.separable_[field_index(CoefficientField::inv_kappa)] = sep_const(1.0 / kappa0);
    m.separable_[field_index(CoefficientField::gain_loss)] = sep_const(0.0);
    m.separable_[field_index(CoefficientField::sigma)] = sep_const(0.0);
    m.form_ = {CoefficientField::inv_kappa, CoefficientField::inv_rho, std::nullopt};
    m.background_speed_ = std::sqrt(kappa0 / rho0);
    m.validate_and_record_bounds({});
    return m;
}

CoefficientModel CoefficientModel::gaussian_modulation(const GaussianModulationParams& p,
                                                       Interval domain) {
    CoefficientModel m;
    m.domain_ = domain;
    auto profile = [p](double x) {
        const double d = (x - p.center) / p.width;
        return 0.5 * std::exp(-0.5 * d * d);
    };
    auto g = [](double t) { return std::sin(kTwoPi * t); };
    auto dg = [](double t) { return kTwoPi * std::cos(kTwoPi * t); };

    m.rho_ = [profile, g, p](double x, double t) { return 1.0 + p.alpha_rho * profile(x) * g(t); };
    m.kappa_ = [profile, g, p](double x, double t) {
        return 1.0 + p.alpha_kappa * profile(x) * g(t);
    };
    m.dt_kappa_ = [profile, dg, p](double x, double t) {
        return p.alpha_kappa * profile(x) * dg(t);
    };
    if (p.beta_sigma != 0.0)
        m.sigma_ = [profile, g, p](double x, double t) {
            return p.beta_sigma * profile(x) * g(t);
        };

    // rho, kappa and sigma are affine in g(t); their reciprocals and the
    // gain/loss weight are not.
    auto one = [](double) { return 1.0; };
    auto zero = [](double) { return 0.0; };
    m.separable_[field_index(CoefficientField::rho)] =
        SeparableWeight{one, [profile, p](double x) { return p.alpha_rho * profile(x); }, g};
    m.separable_[field_index(CoefficientField::kappa)] =
        SeparableWeight{one, [profile, p](double x) { return p.alpha_kappa * profile(x); }, g};
    m.separable_[field_index(CoefficientField::sigma)] =
        SeparableWeight{zero, [profile, p](double x) { return p.beta_sigma * profile(x); }, g};

    m.form_ = {CoefficientField::rho, CoefficientField::kappa,
               p.beta_sigma != 0.0 ? std::optional<CoefficientField>(CoefficientField::sigma)
                                   : std::nullopt};
    m.background_speed_ = 1.0;
    const std::array<double, 3> extra = {p.center, p.center - p.width, p.center + p.width};
    m.validate_and_record_bounds(extra);
    return m;
}

CoefficientModel CoefficientModel::resonator_chain(const ResonatorChainParams& p,
                                                   Interval domain) {
    if (p.count < 1 || p.length <= 0.0 || p.gap < 0.0)
        throw ValidationError("resonator_chain: count >= 1, length > 0, gap >= 0 required");
    if (std::abs(p.alpha_rho) >= 1.0 || std::abs(p.alpha_kappa) >= 1.0)
        throw ValidationError("resonator_chain: |alpha| must be < 1 to keep coefficients positive");

    CoefficientModel m;
    m.domain_ = domain;
    // Half-open membership [x_i^-, x_i^+): interfaces are meshed exactly,
    // so the choice of side only affects the collocated nodal quadrature
    // at the interface vertex itself.
    auto inside = [p](double x) {
        const double period = p.length + p.gap;
        const double off = x - p.first_left;
        if (off < 0.0) return false;
        const int idx = static_cast<int>(std::floor(off / period));
        if (idx >= p.count) return false;
        return off - idx * period < p.length;
    };

    m.rho_ = [inside, p](double x, double t) {
        return inside(x) ? p.rho_r / (1.0 + p.alpha_rho * std::cos(p.omega_rho * t)) : 1.0;
    };
    m.kappa_ = [inside, p](double x, double t) {
        return inside(x) ? p.kappa_r / (1.0 + p.alpha_kappa * std::cos(p.omega_kappa * t)) : 1.0;
    };
    // d/dt kappa = kappa_r * alpha_kappa * omega_kappa * sin(omega t) / (1 + alpha cos)^2
    m.dt_kappa_ = [inside, p](double x, double t) {
        if (!inside(x)) return 0.0;
        const double c = 1.0 + p.alpha_kappa * std::cos(p.omega_kappa * t);
        return p.kappa_r * p.alpha_kappa * p.omega_kappa * std::sin(p.omega_kappa * t) / (c * c);
    };

    auto zero_fn = [](double) { return 0.0; };
    auto ind = [inside](double x) { return inside(x) ? 1.0 : 0.0; };
    m.separable_[field_index(CoefficientField::inv_rho)] = SeparableWeight{
        [inside, p](double x) { return inside(x) ? 1.0 / p.rho_r : 1.0; },
        [ind, p](double x) { return ind(x) * p.alpha_rho / p.rho_r; },
        [p](double t) { return std::cos(p.omega_rho * t); }};
    m.separable_[field_index(CoefficientField::inv_kappa)] = SeparableWeight{
        [inside, p](double x) { return inside(x) ? 1.0 / p.kappa_r : 1.0; },
        [ind, p](double x) { return ind(x) * p.alpha_kappa / p.kappa_r; },
        [p](double t) { return std::cos(p.omega_kappa * t); }};
    m.separable_[field_index(CoefficientField::gain_loss)] = SeparableWeight{
        zero_fn, [ind, p](double x) { return -ind(x) * p.alpha_kappa * p.omega_kappa / p.kappa_r; },
        [p](double t) { return std::sin(p.omega_kappa * t); }};
    m.separable_[field_index(CoefficientField::sigma)] =
        SeparableWeight{zero_fn, zero_fn, [](double) { return 0.0; }};

    // Stepped as M(t) u'' + K(t) u = 0 with weights 1/kappa and 1/rho;
    // the analytic gain/loss field stays available for the projection.
    m.form_ = {CoefficientField::inv_kappa, CoefficientField::inv_rho, std::nullopt};
    m.background_speed_ = 1.0;
    m.chain_ = Interval{p.first_left, p.chain_right()};

    std::vector<double> extra;
    for (int i = 0; i < p.count; ++i) {
        const double xl = p.first_left + i * (p.length + p.gap);
        const double xr = xl + p.length;
        m.interfaces_.push_back(xl);
        m.interfaces_.push_back(xr);
        extra.push_back(xl + 0.25 * p.length);
        extra.push_back(xl + 0.5 * p.length);
    }
    m.validate_and_record_bounds(extra);
    return m;
}

CoefficientModel CoefficientModel::manufactured(ManufacturedCoefficients mc, Interval domain) {
    CoefficientModel m;
    m.domain_ = domain;
    if (!mc.rho || !mc.kappa)
        throw ValidationError("manufactured model: rho and kappa evaluators are required");
    m.rho_ = std::move(mc.rho);
    m.kappa_ = std::move(mc.kappa);
    m.dt_kappa_ = std::move(mc.dt_kappa);
    m.sigma_ = std::move(mc.sigma);
    m.form_ = mc.form;
    for (auto& [f, w] : mc.declared_separable) m.separable_[field_index(f)] = std::move(w);
    m.background_speed_ = std::sqrt(m.kappa_(domain.left, 0.0) / m.rho_(domain.left, 0.0));
    m.validate_and_record_bounds({});
    return m;
}

}  // namespace tmwave
