#include "tmwave/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "tmwave/errors.hpp"
#include "tmwave/mesh.hpp"
#include "tmwave/stepping.hpp"

namespace tmwave {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& context) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw ParseError("unknown key '" + it.key() + "' in " + context);
    }
}

const json& require(const json& obj, const char* key, const std::string& context) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError("missing key '" + std::string(key) + "' in " + context);
    return *it;
}

template <typename T>
T as(const json& v, const std::string& what) {
    try {
        return v.get<T>();
    } catch (const json::exception& e) {
        throw ParseError("bad value for " + what + ": " + e.what());
    }
}

template <typename T>
T field(const json& obj, const char* key, const std::string& context) {
    return as<T>(require(obj, key, context), context + "." + key);
}

template <typename T>
T field_or(const json& obj, const char* key, const std::string& context, T fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    return as<T>(*it, context + "." + key);
}

DtRule parse_dt_rule(const json& obj, const std::string& context) {
    const std::string rule = field<std::string>(obj, "rule", context);
    DtRule dt;
    if (rule == "cfl") {
        check_keys(obj, {"rule", "cfl"}, context);
        dt.kind = DtRule::Kind::cfl;
        dt.cfl = field_or<double>(obj, "cfl", context, 0.5);
    } else if (rule == "h_power") {
        check_keys(obj, {"rule", "dt0", "exponent"}, context);
        dt.kind = DtRule::Kind::h_power;
        dt.dt0 = field<double>(obj, "dt0", context);
        dt.exponent = field_or<double>(obj, "exponent", context, 1.5);
    } else {
        throw ParseError(context + ".rule must be 'cfl' or 'h_power'");
    }
    return dt;
}

json dt_rule_to_json(const DtRule& dt) {
    json j;
    if (dt.kind == DtRule::Kind::cfl) {
        j["rule"] = "cfl";
        j["cfl"] = dt.cfl;
    } else {
        j["rule"] = "h_power";
        j["dt0"] = dt.dt0;
        j["exponent"] = dt.exponent;
    }
    return j;
}

void validate_scenario(const Scenario& s) {
    std::vector<std::string> bad;
    if (!(s.domain.left < s.domain.right)) bad.push_back("domain must satisfy left < right");
    if (!(s.final_time > 0.0)) bad.push_back("final_time must be > 0");
    if (s.mesh_levels.empty()) bad.push_back("mesh_levels must not be empty");
    for (size_t i = 0; i + 1 < s.mesh_levels.size(); ++i)
        if (s.mesh_levels[i] >= s.mesh_levels[i + 1]) {
            bad.push_back("mesh_levels must be strictly increasing");
            break;
        }
    for (int n : s.mesh_levels)
        if (n < 1) {
            bad.push_back("mesh_levels entries must be >= 1");
            break;
        }
    for (double t : s.snapshot_times)
        if (t < 0.0 || t > s.final_time) {
            bad.push_back("snapshot_times must lie in [0, final_time]");
            break;
        }
    if (s.reference_refinement < 2) bad.push_back("reference_refinement must be >= 2");
    if (!(s.divergence_guard > 0.0)) bad.push_back("divergence_guard must be > 0");
    if (!(s.pulse.width > 0.0)) bad.push_back("pulse.width must be > 0");
    if (s.dt_rule.kind == DtRule::Kind::cfl && !(s.dt_rule.cfl > 0.0))
        bad.push_back("dt.cfl must be > 0");
    if (s.dt_rule.kind == DtRule::Kind::h_power && !(s.dt_rule.dt0 > 0.0))
        bad.push_back("dt.dt0 must be > 0");
    if (s.analytic_solution && *s.analytic_solution != "standing_sine")
        bad.push_back("analytic_solution must be 'standing_sine'");
    if (s.projection) {
        const auto& p = *s.projection;
        if (p.manufactured != "sin_pi_x_cos_t" && p.manufactured != "in_space")
            bad.push_back("projection.manufactured must be 'sin_pi_x_cos_t' or 'in_space'");
        if (p.gamma_time_samples < 2) bad.push_back("projection.gamma_time_samples must be >= 2");
        for (double t : p.sample_times)
            if (t < 0.0 || t > s.final_time) {
                bad.push_back("projection.sample_times must lie in [0, final_time]");
                break;
            }
        if (p.dt.kind == DtRule::Kind::h_power && !(p.dt.dt0 > 0.0))
            bad.push_back("projection.dt.dt0 must be > 0");
    }
    if (!bad.empty()) {
        std::string msg = "scenario validation failed:";
        for (const auto& b : bad) msg += "\n  - " + b;
        throw ValidationError(msg);
    }
}

}  // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
    if (!root.is_object()) throw ParseError(origin + ": top level must be an object");
    check_keys(root,
               {"name", "domain", "final_time", "model", "pulse", "mesh_levels", "dt",
                "snapshot_times", "output_dir", "reference_refinement", "lumped_mass",
                "divergence_guard", "analytic_solution", "projection"},
               "scenario");

    Scenario s;
    s.name = field<std::string>(root, "name", "scenario");
    const auto dom = field<std::vector<double>>(root, "domain", "scenario");
    if (dom.size() != 2) throw ParseError("scenario.domain must be [left, right]");
    s.domain = {dom[0], dom[1]};
    s.final_time = field<double>(root, "final_time", "scenario");
    s.mesh_levels = field<std::vector<int>>(root, "mesh_levels", "scenario");
    s.dt_rule = parse_dt_rule(require(root, "dt", "scenario"), "scenario.dt");
    s.snapshot_times = field_or<std::vector<double>>(root, "snapshot_times", "scenario", {});
    s.output_dir = field_or<std::string>(root, "output_dir", "scenario", "out");
    s.reference_refinement = field_or<int>(root, "reference_refinement", "scenario", 16);
    s.lumped_mass = field_or<bool>(root, "lumped_mass", "scenario", true);
    s.divergence_guard = field_or<double>(root, "divergence_guard", "scenario", 1e12);
    if (root.contains("analytic_solution"))
        s.analytic_solution = field<std::string>(root, "analytic_solution", "scenario");

    const json& model = require(root, "model", "scenario");
    const std::string type = field<std::string>(model, "type", "scenario.model");
    if (type == "constant") {
        check_keys(model, {"type", "rho", "kappa"}, "scenario.model");
        ConstantModelParams p;
        p.rho = field_or<double>(model, "rho", "scenario.model", 1.0);
        p.kappa = field_or<double>(model, "kappa", "scenario.model", 1.0);
        s.model = p;
    } else if (type == "gaussian_modulation") {
        check_keys(model, {"type", "alpha_rho", "alpha_kappa", "beta_sigma", "center", "width"},
                   "scenario.model");
        GaussianModulationParams p;
        p.alpha_rho = field<double>(model, "alpha_rho", "scenario.model");
        p.alpha_kappa = field<double>(model, "alpha_kappa", "scenario.model");
        p.beta_sigma = field_or<double>(model, "beta_sigma", "scenario.model", 0.0);
        p.center = field<double>(model, "center", "scenario.model");
        p.width = field<double>(model, "width", "scenario.model");
        s.model = p;
    } else if (type == "resonator_chain") {
        check_keys(model,
                   {"type", "count", "first_left", "length", "gap", "rho_r", "kappa_r",
                    "alpha_rho", "alpha_kappa", "omega_rho", "omega_kappa"},
                   "scenario.model");
        ResonatorChainParams p;
        p.count = field<int>(model, "count", "scenario.model");
        p.first_left = field<double>(model, "first_left", "scenario.model");
        p.length = field_or<double>(model, "length", "scenario.model", 1.0);
        p.gap = field_or<double>(model, "gap", "scenario.model", 1.0);
        p.rho_r = field<double>(model, "rho_r", "scenario.model");
        p.kappa_r = field<double>(model, "kappa_r", "scenario.model");
        p.alpha_rho = field<double>(model, "alpha_rho", "scenario.model");
        p.alpha_kappa = field<double>(model, "alpha_kappa", "scenario.model");
        p.omega_rho = field<double>(model, "omega_rho", "scenario.model");
        p.omega_kappa = field<double>(model, "omega_kappa", "scenario.model");
        s.model = p;
    } else {
        throw ParseError("scenario.model.type must be one of "
                         "'constant', 'gaussian_modulation', 'resonator_chain'");
    }

    if (root.contains("pulse")) {
        const json& pulse = root["pulse"];
        check_keys(pulse, {"center", "width", "direction", "amplitude"}, "scenario.pulse");
        s.pulse.center = field<double>(pulse, "center", "scenario.pulse");
        s.pulse.width = field<double>(pulse, "width", "scenario.pulse");
        const std::string dir =
            field_or<std::string>(pulse, "direction", "scenario.pulse", "right");
        if (dir == "right")
            s.pulse.direction = 1;
        else if (dir == "left")
            s.pulse.direction = -1;
        else
            throw ParseError("scenario.pulse.direction must be 'right' or 'left'");
        s.pulse.amplitude = field_or<double>(pulse, "amplitude", "scenario.pulse", 1.0);
    } else if (!root.contains("projection") && !s.analytic_solution) {
        throw ParseError("scenario requires 'pulse' unless projection/analytic_solution is set");
    }

    if (root.contains("projection")) {
        const json& proj = root["projection"];
        check_keys(proj, {"manufactured", "dt", "sample_times", "gamma_time_samples"},
                   "scenario.projection");
        ProjectionSpec p;
        p.manufactured = field<std::string>(proj, "manufactured", "scenario.projection");
        if (proj.contains("dt"))
            p.dt = parse_dt_rule(proj["dt"], "scenario.projection.dt");
        p.sample_times = field_or<std::vector<double>>(proj, "sample_times", "scenario.projection",
                                                       p.sample_times);
        p.gamma_time_samples =
            field_or<int>(proj, "gamma_time_samples", "scenario.projection", 33);
        s.projection = p;
    }

    validate_scenario(s);
    return s;
}

Scenario parse_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario_text(ss.str(), path.string());
}

std::string scenario_to_json(const Scenario& s) {
    json root;
    root["name"] = s.name;
    root["domain"] = {s.domain.left, s.domain.right};
    root["final_time"] = s.final_time;
    root["mesh_levels"] = s.mesh_levels;
    root["dt"] = dt_rule_to_json(s.dt_rule);
    root["snapshot_times"] = s.snapshot_times;
    root["output_dir"] = s.output_dir;
    root["reference_refinement"] = s.reference_refinement;
    root["lumped_mass"] = s.lumped_mass;
    root["divergence_guard"] = s.divergence_guard;
    if (s.analytic_solution) root["analytic_solution"] = *s.analytic_solution;

    json model;
    if (const auto* c = std::get_if<ConstantModelParams>(&s.model)) {
        model["type"] = "constant";
        model["rho"] = c->rho;
        model["kappa"] = c->kappa;
    } else if (const auto* g = std::get_if<GaussianModulationParams>(&s.model)) {
        model["type"] = "gaussian_modulation";
        model["alpha_rho"] = g->alpha_rho;
        model["alpha_kappa"] = g->alpha_kappa;
        model["beta_sigma"] = g->beta_sigma;
        model["center"] = g->center;
        model["width"] = g->width;
    } else if (const auto* r = std::get_if<ResonatorChainParams>(&s.model)) {
        model["type"] = "resonator_chain";
        model["count"] = r->count;
        model["first_left"] = r->first_left;
        model["length"] = r->length;
        model["gap"] = r->gap;
        model["rho_r"] = r->rho_r;
        model["kappa_r"] = r->kappa_r;
        model["alpha_rho"] = r->alpha_rho;
        model["alpha_kappa"] = r->alpha_kappa;
        model["omega_rho"] = r->omega_rho;
        model["omega_kappa"] = r->omega_kappa;
    }
    root["model"] = model;

    json pulse;
    pulse["center"] = s.pulse.center;
    pulse["width"] = s.pulse.width;
    pulse["direction"] = s.pulse.direction > 0 ? "right" : "left";
    pulse["amplitude"] = s.pulse.amplitude;
    root["pulse"] = pulse;

    if (s.projection) {
        json proj;
        proj["manufactured"] = s.projection->manufactured;
        proj["dt"] = dt_rule_to_json(s.projection->dt);
        proj["sample_times"] = s.projection->sample_times;
        proj["gamma_time_samples"] = s.projection->gamma_time_samples;
        root["projection"] = proj;
    }
    return root.dump();
}

CoefficientModel build_model(const Scenario& s) {
    if (const auto* c = std::get_if<ConstantModelParams>(&s.model))
        return CoefficientModel::constant(c->rho, c->kappa, s.domain);
    if (const auto* g = std::get_if<GaussianModulationParams>(&s.model))
        return CoefficientModel::gaussian_modulation(*g, s.domain);
    return CoefficientModel::resonator_chain(std::get<ResonatorChainParams>(s.model), s.domain);
}

std::pair<SpatialFn, SpatialFn> pulse_initial_conditions(const PulseSpec& pulse, Interval domain,
                                                         double background_speed) {
    const double x0 = pulse.center, w = pulse.width, amp = pulse.amplitude;
    const double a = domain.left, b = domain.right;
    const double c = background_speed * pulse.direction;
    auto profile = [amp, x0, w](double x) {
        const double d = (x - x0) / w;
        return amp * std::exp(-0.5 * d * d);
    };
    auto profile_dx = [amp, x0, w](double x) {
        const double d = (x - x0) / w;
        return -amp * d / w * std::exp(-0.5 * d * d);
    };
    // Free solution profile(x - c t) plus one odd image per wall so that
    // both u0 and v0 vanish at the boundary; each image is an opposite-
    // going pulse that exits the domain immediately.
    SpatialFn u0 = [=](double x) { return profile(x) - profile(2 * a - x) - profile(2 * b - x); };
    SpatialFn v0 = [=](double x) {
        return c * (-profile_dx(x) + profile_dx(2 * a - x) + profile_dx(2 * b - x));
    };
    return {u0, v0};
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write output file: " + path.string());
    out << content;
}

std::string rate_csv(const std::string& config_json, const std::vector<std::string>& extra_header,
                     const RateTable& table, bool fitted) {
    std::string s = "# config: " + config_json + "\n";
    for (const auto& line : extra_header) s += "# " + line + "\n";
    s += "h,dt,err_l2,err_h1\n";
    for (const auto& r : table.rows)
        s += format_g17(r.h) + "," + format_g17(r.dt) + "," + format_g17(r.err_l2) + "," +
             format_g17(r.err_h1) + "\n";
    if (fitted)
        s += "# slope_l2=" + format_g17(table.slope_l2) +
             " slope_h1=" + format_g17(table.slope_h1) + "\n";
    else
        s += "# exact representation: slopes not fitted\n";
    return s;
}

double adjusted_dt(double dt_nominal, double T) {
    const int n = std::max(1, static_cast<int>(std::ceil(T / dt_nominal - 1e-9)));
    return T / n;
}

struct AnalyticStandingWave {
    SpatialFn u0;
    SpatialFn v0;
    SpaceTimeFn u;
    SpaceTimeFn u_x;
};

AnalyticStandingWave standing_sine(Interval dom, double c) {
    const double a = dom.left;
    const double k = 3.14159265358979323846 / dom.length();
    AnalyticStandingWave w;
    w.u0 = [a, k](double x) { return std::sin(k * (x - a)); };
    w.v0 = [](double) { return 0.0; };
    w.u = [a, k, c](double x, double t) { return std::sin(k * (x - a)) * std::cos(k * c * t); };
    w.u_x = [a, k, c](double x, double t) {
        return k * std::cos(k * (x - a)) * std::cos(k * c * t);
    };
    return w;
}

}  // namespace

ConvergenceOutput run_convergence(const Scenario& s, const std::filesystem::path& out_dir) {
    if (s.mesh_levels.size() < 3)
        throw ValidationError("convergence run needs at least 3 mesh levels");
    const CoefficientModel model = build_model(s);
    const double T = s.final_time;

    auto make_space = [&](int n) {
        return FeSpace::create(
            build_mesh(s.domain.left, s.domain.right, n, model.interface_vertices()));
    };
    const auto coarse_space = make_space(s.mesh_levels.front());
    const double h0 = coarse_space->mesh().max_element_length();

    auto dt_for = [&](const FeSpace& sp) {
        double dt_nom;
        if (s.dt_rule.kind == DtRule::Kind::cfl)
            dt_nom = stable_dt(sp, model, s.dt_rule.cfl);
        else
            dt_nom = s.dt_rule.dt0 *
                     std::pow(sp.mesh().max_element_length() / h0, s.dt_rule.exponent);
        return adjusted_dt(dt_nom, T);
    };

    SpatialFn u0, v0;
    std::optional<AnalyticStandingWave> analytic;
    if (s.analytic_solution) {
        analytic = standing_sine(s.domain, model.background_speed());
        u0 = analytic->u0;
        v0 = analytic->v0;
    } else {
        std::tie(u0, v0) = pulse_initial_conditions(s.pulse, s.domain, model.background_speed());
    }

    auto final_state = [&](const std::shared_ptr<const FeSpace>& sp, double dt) {
        RunOptions opt;
        opt.snapshot_times = {T};
        opt.lumped_mass = s.lumped_mass;
        opt.divergence_guard = s.divergence_guard;
        Trajectory tr = run(sp, model, u0, v0, nullptr, dt, T, opt);
        return tr.snapshots.back().second;
    };

    ConvergenceOutput out;
    std::optional<FeFunction> reference;
    if (!analytic) {
        const auto ref_space = make_space(s.mesh_levels.back() * s.reference_refinement);
        reference = final_state(ref_space, dt_for(*ref_space));
    }

    for (int n : s.mesh_levels) {
        try {
            const auto space = make_space(n);
            const double dt = dt_for(*space);
            const FeFunction uh = final_state(space, dt);
            ErrorPair err;
            if (analytic) {
                err = error_vs_callable(
                    uh, [&](double x) { return analytic->u(x, T); },
                    [&](double x) { return analytic->u_x(x, T); });
            } else {
                err = error_vs_reference(uh, *reference);
            }
            out.table.rows.push_back({space->mesh().max_element_length(), dt, err.l2, err.h1});
        } catch (const Error& e) {
            out.level_failures.push_back("level " + std::to_string(n) + ": " + e.what());
        }
    }
    if (out.table.rows.size() >= 2) fit_rates(out.table);

    const auto path = out_dir / "rates.csv";
    std::vector<std::string> header = {"command: convergence"};
    for (const auto& f : out.level_failures) header.push_back("failed " + f);
    write_text_file(path, rate_csv(scenario_to_json(s), header, out.table,
                                   out.table.rows.size() >= 2));
    out.files.push_back(path);
    return out;
}

ResonatorOutput run_resonators(const Scenario& s, const std::filesystem::path& out_dir) {
    if (!std::holds_alternative<ResonatorChainParams>(s.model))
        throw ValidationError("resonator run requires a resonator_chain model");
    const CoefficientModel model = build_model(s);
    const double T = s.final_time;

    const int level = s.mesh_levels.back();
    const auto space = FeSpace::create(
        build_mesh(s.domain.left, s.domain.right, level, model.interface_vertices()));
    double dt_nom;
    if (s.dt_rule.kind == DtRule::Kind::cfl)
        dt_nom = stable_dt(*space, model, s.dt_rule.cfl);
    else
        dt_nom = s.dt_rule.dt0;
    const double dt = adjusted_dt(dt_nom, T);

    const Interval chain = *model.chain_interval();
    const auto coords = space->dof_coords();
    int chain_begin = 0, chain_end = 0;
    for (int i = 0; i < space->n_dofs(); ++i) {
        if (coords[i] < chain.left) chain_begin = i + 1;
        if (coords[i] <= chain.right) chain_end = i + 1;
    }

    ResonatorOutput out;
    auto [u0, v0] = pulse_initial_conditions(s.pulse, s.domain, model.background_speed());
    RunOptions opt;
    opt.snapshot_times = s.snapshot_times;
    opt.lumped_mass = s.lumped_mass;
    opt.divergence_guard = s.divergence_guard;
    opt.observer = [&](double t, std::span<const double> u) {
        double cm = 0.0, dm = 0.0;
        for (int i = 0; i < static_cast<int>(u.size()); ++i) {
            const double v = std::abs(u[i]);
            dm = std::max(dm, v);
            if (i >= chain_begin && i < chain_end) cm = std::max(cm, v);
        }
        out.times.push_back(t);
        out.chain_max.push_back(cm);
        out.domain_max.push_back(dm);
    };

    const Trajectory tr = run(space, model, u0, v0, nullptr, dt, T, opt);

    const std::string config = scenario_to_json(s);
    for (size_t i = 0; i < s.snapshot_times.size(); ++i) {
        const double requested = s.snapshot_times[i];
        const auto& [t_actual, fe] = tr.snapshots[i];
        char label[32];
        std::snprintf(label, sizeof(label), "%g", requested);
        std::string body = "# config: " + config + "\n";
        body += "# requested_t=" + format_g17(requested) + " actual_t=" + format_g17(t_actual) +
                "\n";
        body += "x,u\n";
        for (int k = 0; k < fe.space->n_dofs(); ++k)
            body += format_g17(fe.space->dof_coords()[k]) + "," + format_g17(fe.dofs[k]) + "\n";
        const auto path = out_dir / ("snapshot_t" + std::string(label) + ".csv");
        write_text_file(path, body);
        out.files.push_back(path);
    }

    std::string amp = "# config: " + config + "\n";
    amp += "t,max_abs_u_chain,max_abs_u_domain\n";
    for (size_t i = 0; i < out.times.size(); ++i)
        amp += format_g17(out.times[i]) + "," + format_g17(out.chain_max[i]) + "," +
               format_g17(out.domain_max[i]) + "\n";
    const auto amp_path = out_dir / "amplitude.csv";
    write_text_file(amp_path, amp);
    out.files.push_back(amp_path);
    return out;
}

namespace {

ManufacturedSolution make_manufactured(const std::string& kind, Interval dom) {
    const double a = dom.left, b = dom.right;
    ManufacturedSolution m;
    if (kind == "sin_pi_x_cos_t") {
        const double k = 3.14159265358979323846 / dom.length();
        m.u = [a, k](double x, double t) { return std::sin(k * (x - a)) * std::cos(t); };
        m.u_t = [a, k](double x, double t) { return -std::sin(k * (x - a)) * std::sin(t); };
        m.u_x = [a, k](double x, double t) { return k * std::cos(k * (x - a)) * std::cos(t); };
        m.u_tx = [a, k](double x, double t) { return -k * std::cos(k * (x - a)) * std::sin(t); };
    } else if (kind == "in_space") {
        // piecewise-quadratic in space (a member of the FE space on any
        // mesh) times a smooth modulation in time
        m.u = [a, b](double x, double t) { return (x - a) * (b - x) * std::cos(t); };
        m.u_t = [a, b](double x, double t) { return -(x - a) * (b - x) * std::sin(t); };
        m.u_x = [a, b](double x, double t) { return (a + b - 2.0 * x) * std::cos(t); };
        m.u_tx = [a, b](double x, double t) { return -(a + b - 2.0 * x) * std::sin(t); };
    } else {
        throw ValidationError("unknown manufactured solution: " + kind);
    }
    return m;
}

}  // namespace

ProjectionOutput run_projection_study(const Scenario& s, const std::filesystem::path& out_dir) {
    if (!s.projection) throw ValidationError("scenario has no projection section");
    if (s.mesh_levels.size() < 2)
        throw ValidationError("projection study needs at least 2 mesh levels");
    const ProjectionSpec& spec = *s.projection;
    const CoefficientModel model = build_model(s);
    const ManufacturedSolution exact = make_manufactured(spec.manufactured, s.domain);

    ProjectionOutput out;
    out.study = projection_rate_study(model, exact, s.mesh_levels, s.final_time, spec.dt.dt0,
                                      spec.dt.exponent, spec.sample_times,
                                      spec.gamma_time_samples);

    const std::string config = scenario_to_json(s);
    std::vector<std::string> header = {
        "command: projection-study",
        "gamma: " + format_g17(out.study.gamma),
        "lambda_hat: [" + format_g17(out.study.lambda_hat_min) + ", " +
            format_g17(out.study.lambda_hat_max) + "]"};

    RateTable table;
    RateTable table_k1;
    for (const auto& r : out.study.rows) {
        table.rows.push_back({r.h, r.dt, r.err.l2, r.err.h1});
        table_k1.rows.push_back({r.h, r.dt, r.err_dt.l2, r.err_dt.h1});
    }
    const bool fitted = !out.study.exact_representation;
    if (fitted) {
        table.slope_l2 = out.study.slope_l2;
        table.slope_h1 = out.study.slope_h1;
        table_k1.slope_l2 = out.study.slope_dt_l2;
        table_k1.slope_h1 = out.study.slope_dt_h1;
    }

    const auto path = out_dir / "projection_rates.csv";
    write_text_file(path, rate_csv(config, header, table, fitted));
    out.files.push_back(path);
    auto header_k1 = header;
    header_k1.push_back("errors: centered time difference of w minus u_t");
    const auto path_k1 = out_dir / "projection_rates_k1.csv";
    write_text_file(path_k1, rate_csv(config, header_k1, table_k1, fitted));
    out.files.push_back(path_k1);
    return out;
}

}  // namespace tmwave
