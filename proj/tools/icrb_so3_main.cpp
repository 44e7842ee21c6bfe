#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "icrb/errors.hpp"
#include "icrb/parallel.hpp"
#include "icrb/report.hpp"
#include "icrb/runner.hpp"
#include "icrb/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitVerification = 3;

struct RunFlags {
    std::string config_path;
    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> seed;
    unsigned jobs = icrb::default_jobs();
    std::string csv_path;
};

void add_run_flags(CLI::App* cmd, RunFlags& flags, bool with_overrides) {
    cmd->add_option("config", flags.config_path, "scenario JSON file")->required();
    if (with_overrides) {
        cmd->add_option("--trials", flags.trials, "override n_trials");
        cmd->add_option("--seed", flags.seed, "override seed");
        cmd->add_option("--jobs", flags.jobs, "worker threads (default: all cores)");
        cmd->add_option("--csv", flags.csv_path, "write per-trial errors as CSV");
    }
}

icrb::Scenario load_with_overrides(const RunFlags& flags) {
    icrb::Scenario scenario = icrb::load_scenario(flags.config_path);
    if (flags.trials.has_value()) {
        if (*flags.trials < 1) {
            throw icrb::InvalidScenarioError("--trials must be at least 1");
        }
        scenario.n_trials = static_cast<std::size_t>(*flags.trials);
    }
    if (flags.seed.has_value()) {
        scenario.seed = *flags.seed;
    }
    icrb::validate_scenario(scenario);
    return scenario;
}

int emit_report(const icrb::Report& report, const std::vector<icrb::Vec3>& errors,
                const RunFlags& flags) {
    if (!flags.csv_path.empty()) {
        std::ofstream csv(flags.csv_path);
        if (!csv) {
            std::cerr << "error: cannot open CSV path " << flags.csv_path << "\n";
            return kExitConfig;
        }
        icrb::write_trials_csv(csv, errors);
    }
    // Canonical report (timing zeroed) keeps stdout byte-identical across
    // repeated runs; the measured wall time goes to stderr.
    std::cout << icrb::report_to_canonical_string(report);
    std::cerr << "wall time: " << report.timing << " s\n";
    const double rejected_fraction =
        static_cast<double>(report.rejected_trials) /
        static_cast<double>(report.trial_count);
    if (rejected_fraction > 1e-3) {
        std::cerr << "error: " << report.rejected_trials << " of "
                  << report.trial_count
                  << " trials hit the cut locus; the report is invalid "
                     "(noise too large for the local analysis)\n";
        return kExitVerification;
    }
    return kExitOk;
}

int run_mode(const RunFlags& flags, icrb::ScenarioMode mode) {
    const icrb::Scenario scenario = load_with_overrides(flags);
    std::vector<icrb::Vec3> errors;
    const icrb::Report report =
        mode == icrb::ScenarioMode::static_wahba
            ? icrb::run_static(scenario, flags.jobs, &errors)
            : icrb::run_dynamic(scenario, flags.jobs, &errors);
    return emit_report(report, errors, flags);
}

int run_info(const RunFlags& flags) {
    const icrb::Scenario scenario = icrb::load_scenario(flags.config_path);
    const icrb::InfoMatrix j = icrb::scenario_information(scenario);
    const icrb::Mat3 j_inv = icrb::invert_information(j);
    nlohmann::json out;
    for (int i = 0; i < 3; ++i) {
        out["j"].push_back({j.j(i, 0), j.j(i, 1), j.j(i, 2)});
        out["j_inverse"].push_back({j_inv(i, 0), j_inv(i, 1), j_inv(i, 2)});
    }
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Intrinsic Cramer-Rao bounds for attitude estimation on SO(3)"};
    app.require_subcommand(1);

    RunFlags static_flags, dynamic_flags, info_flags;
    CLI::App* cmd_static =
        app.add_subcommand("static", "Monte Carlo Wahba run against the bound");
    add_run_flags(cmd_static, static_flags, true);
    CLI::App* cmd_dynamic =
        app.add_subcommand("dynamic", "Monte Carlo IEKF run against the bound");
    add_run_flags(cmd_dynamic, dynamic_flags, true);
    CLI::App* cmd_info =
        app.add_subcommand("info", "print the scenario's J and J^-1, no simulation");
    add_run_flags(cmd_info, info_flags, false);
    CLI::App* cmd_verify =
        app.add_subcommand("verify", "run the built-in identity checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (cmd_static->parsed()) {
            return run_mode(static_flags, icrb::ScenarioMode::static_wahba);
        }
        if (cmd_dynamic->parsed()) {
            return run_mode(dynamic_flags, icrb::ScenarioMode::dynamic_iekf);
        }
        if (cmd_info->parsed()) {
            return run_info(info_flags);
        }
        if (cmd_verify->parsed()) {
            const int failures = icrb::run_verify(std::cout);
            if (failures != 0) {
                std::cerr << "verify: " << failures << " check(s) failed\n";
                return kExitVerification;
            }
            return kExitOk;
        }
    } catch (const icrb::InvalidScenarioError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const icrb::UnobservableError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const icrb::SingularInformationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const icrb::AngleNearPiError& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return kExitVerification;
    } catch (const std::exception& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return kExitVerification;
    }
    return kExitOk;
}
