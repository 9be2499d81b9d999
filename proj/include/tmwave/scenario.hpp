#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tmwave/analysis.hpp"
#include "tmwave/coefficients.hpp"
#include "tmwave/projection.hpp"

namespace tmwave {

/// Gaussian pulse launched into the background medium. The initial
/// velocity makes it purely one-directional; boundary image terms keep
/// the data compatible with the homogeneous Dirichlet conditions.
struct PulseSpec {
    double center = 0.0;
    double width = 0.1;
    int direction = 1;  // +1 rightward, -1 leftward
    double amplitude = 1.0;
};

struct DtRule {
    enum class Kind { cfl, h_power };
    Kind kind = Kind::cfl;
    double cfl = 0.5;        // fraction of the stability heuristic
    double dt0 = 0.01;       // step on the coarsest level
    double exponent = 1.5;   // dt = dt0 * (h/h0)^exponent
};

struct ConstantModelParams {
    double rho = 1.0;
    double kappa = 1.0;
};

struct ProjectionSpec {
    std::string manufactured = "sin_pi_x_cos_t";  // or "in_space"
    DtRule dt{DtRule::Kind::h_power, 0.5, 0.02, 2.0};
    std::vector<double> sample_times{0.25, 0.5, 0.75, 1.0};
    int gamma_time_samples = 33;
};

struct Scenario {
    std::string name;
    Interval domain{0.0, 1.0};
    double final_time = 1.0;
    std::variant<ConstantModelParams, GaussianModulationParams, ResonatorChainParams> model;
    PulseSpec pulse;
    std::vector<int> mesh_levels;
    DtRule dt_rule;
    std::vector<double> snapshot_times;
    std::string output_dir = "out";
    int reference_refinement = 16;
    bool lumped_mass = true;
    double divergence_guard = 1e12;
    std::optional<std::string> analytic_solution;  // "standing_sine"
    std::optional<ProjectionSpec> projection;
};

/// Parse and validate a scenario file. Unknown keys are rejected with a
/// ParseError; every violated invariant is listed in the ValidationError.
Scenario parse_scenario(const std::filesystem::path& path);
Scenario parse_scenario_text(const std::string& text, const std::string& origin = "<string>");

/// Canonical single-line JSON of the resolved scenario (sorted keys);
/// this is what output file headers record.
std::string scenario_to_json(const Scenario& s);

CoefficientModel build_model(const Scenario& s);

/// Initial data (u0, v0) for the pulse on the given interval.
std::pair<SpatialFn, SpatialFn> pulse_initial_conditions(const PulseSpec& pulse, Interval domain,
                                                         double background_speed);

/// %.17g formatting used by all CSV output, chosen so values round-trip
/// exactly and repeated runs are byte-identical.
std::string format_g17(double v);

struct ConvergenceOutput {
    RateTable table;
    std::vector<std::filesystem::path> files;
    std::vector<std::string> level_failures;  // one message per failed level
};
ConvergenceOutput run_convergence(const Scenario& s, const std::filesystem::path& out_dir);

struct ResonatorOutput {
    std::vector<std::filesystem::path> files;
    std::vector<double> times;       // amplitude log, one entry per step
    std::vector<double> chain_max;   // max |u| over the resonator chain
    std::vector<double> domain_max;  // max |u| over the whole domain
};
ResonatorOutput run_resonators(const Scenario& s, const std::filesystem::path& out_dir);

struct ProjectionOutput {
    ProjectionStudyResult study;
    std::vector<std::filesystem::path> files;
};
ProjectionOutput run_projection_study(const Scenario& s, const std::filesystem::path& out_dir);

}  // namespace tmwave
