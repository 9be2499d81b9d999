// Command-line driver for the wave experiments: convergence studies,
// the resonator-chain run, and the projection rate study.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tmwave/errors.hpp"
#include "tmwave/scenario.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
    std::string config;
    std::string out;
    std::string levels;
    bool seed_check = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config, "Scenario JSON file")->required();
    cmd->add_option("--out", args.out, "Output directory (overrides the scenario's output_dir)");
    cmd->add_option("--levels", args.levels,
                    "Comma-separated mesh levels (overrides the scenario's mesh_levels)");
    cmd->add_flag("--seed-check", args.seed_check,
                  "Run the command twice and verify byte-identical outputs");
}

tmwave::Scenario load(const CommonArgs& args) {
    tmwave::Scenario s = tmwave::parse_scenario(args.config);
    if (!args.out.empty()) s.output_dir = args.out;
    if (!args.levels.empty()) {
        std::vector<int> levels;
        std::stringstream ss(args.levels);
        std::string item;
        while (std::getline(ss, item, ',')) levels.push_back(std::stoi(item));
        s.mesh_levels = levels;
    }
    return s;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Runs fn into the scenario's output dir; with --seed-check runs it a
// second time into a scratch dir and compares every produced file.
template <typename Fn>
int run_with_seed_check(const tmwave::Scenario& s, bool seed_check, Fn fn) {
    const fs::path out_dir = s.output_dir;
    const std::vector<fs::path> files = fn(out_dir);
    for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
    if (!seed_check) return 0;

    const fs::path check_dir = out_dir / ".seed-check";
    const std::vector<fs::path> files2 = fn(check_dir);
    bool ok = files.size() == files2.size();
    for (size_t i = 0; ok && i < files.size(); ++i) ok = slurp(files[i]) == slurp(files2[i]);
    std::cout << "determinism check: " << (ok ? "ok" : "MISMATCH") << "\n";
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"1D finite element solver for wave equations in time-modulated media"};
    app.require_subcommand(1);

    CommonArgs conv_args, res_args, proj_args;
    CLI::App* conv = app.add_subcommand("convergence", "Mesh-refinement convergence study");
    add_common(conv, conv_args);
    CLI::App* res = app.add_subcommand("resonators", "Resonator-chain simulation with snapshots");
    add_common(res, res_args);
    CLI::App* proj =
        app.add_subcommand("projection-study", "Rate study of the time-dependent projection");
    add_common(proj, proj_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (conv->parsed()) {
            const tmwave::Scenario s = load(conv_args);
            return run_with_seed_check(s, conv_args.seed_check, [&](const fs::path& dir) {
                auto out = tmwave::run_convergence(s, dir);
                for (const auto& msg : out.level_failures) std::cerr << "warning: " << msg << "\n";
                if (out.table.rows.size() >= 2)
                    std::cout << "slope_l2=" << out.table.slope_l2
                              << " slope_h1=" << out.table.slope_h1 << "\n";
                return out.files;
            });
        }
        if (res->parsed()) {
            const tmwave::Scenario s = load(res_args);
            return run_with_seed_check(s, res_args.seed_check, [&](const fs::path& dir) {
                auto out = tmwave::run_resonators(s, dir);
                if (!out.domain_max.empty())
                    std::cout << "final max|u|: chain=" << out.chain_max.back()
                              << " domain=" << out.domain_max.back() << "\n";
                return out.files;
            });
        }
        const tmwave::Scenario s = load(proj_args);
        return run_with_seed_check(s, proj_args.seed_check, [&](const fs::path& dir) {
            auto out = tmwave::run_projection_study(s, dir);
            std::cout << "gamma=" << out.study.gamma << "\n";
            if (out.study.exact_representation)
                std::cout << "exact representation: errors at roundoff, slopes not fitted\n";
            else
                std::cout << "slope_l2=" << out.study.slope_l2
                          << " slope_h1=" << out.study.slope_h1
                          << " slope_dt_h1=" << out.study.slope_dt_h1 << "\n";
            return out.files;
        });
    } catch (const tmwave::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const tmwave::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const tmwave::DivergedError& e) {
        std::cerr << "numerical failure: " << e.what() << " (step " << e.step_index << ")\n";
        return 3;
    } catch (const tmwave::NotPositiveDefiniteError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const tmwave::GammaSearchFailedError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
