// rebmbo: run, sweep and report seeded optimization experiments.
//
//   rebmbo run    --config exp.json --method rebmbo-c --seed 0 --out runs/
//   rebmbo sweep  --config exp.json --out runs/
//   rebmbo report --manifest runs/manifest.json --checkpoints 10,20,30

#include <cstdlib>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "rebmbo/experiment.hpp"
#include "rebmbo/orchestrator.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kRuntimeError = 2, kPartialFailure = 3 };

namespace ex = rebmbo::experiment;

// An unreadable config file counts as a config error for the exit code.
ex::ExperimentFile load(const std::string& path) {
    try {
        return path.empty() ? ex::parse_config_text("") : ex::parse_config(path);
    } catch (const ex::IoError& e) {
        throw ex::ConfigError("", e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-guided Bayesian optimization experiments"};
    app.require_subcommand(1);

    std::string config_path, method, out, manifest, checkpoints;
    std::optional<std::uint64_t> seed;

    auto* run = app.add_subcommand("run", "Run one method and seed; writes a JSON trace and a CSV");
    run->add_option("--config", config_path, "Experiment file (JSON); defaults when omitted");
    run->add_option("--method", method, "rebmbo-c | rebmbo-s | rebmbo-d | gp-ucb | random");
    run->add_option("--seed", seed, "Run seed");
    run->add_option("--out", out, "Output directory");

    auto* sweep = app.add_subcommand("sweep", "Run every method x seed and write a manifest");
    sweep->add_option("--config", config_path, "Experiment file (JSON)");
    sweep->add_option("--out", out, "Output directory (overrides output_dir)");
    sweep->add_option("--manifest", manifest, "Manifest path (default <out>/manifest.json)");

    auto* report = app.add_subcommand("report", "Summarize a sweep into summary and plot-data CSVs");
    report->add_option("--manifest", manifest, "Manifest written by sweep")->required();
    report->add_option("--checkpoints", checkpoints, "Comma-separated iterations, e.g. 10,20,30");
    report->add_option("--out", out, "Output directory (default: next to the manifest)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfigError;
    }

    try {
        if (*run) {
            const ex::ExperimentFile file = load(config_path);
            const rebmbo::Method m = method.empty() ? file.base.method : rebmbo::parse_method(method);
            const auto w = ex::cmd_run(file, m, seed.value_or(file.base.seed), out.empty() ? file.output_dir : out);
            std::cout << w.json.string() << "\n" << w.csv.string() << "\n";
            return kOk;
        }
        if (*sweep) {
            const ex::ExperimentFile file = load(config_path);
            const auto res = ex::cmd_sweep(file, out.empty() ? file.output_dir : out,
                                           ex::sweep_threads(file.seeds.size()), manifest);
            std::cout << res.manifest.string() << "\n";
            for (const auto& e : res.entries) {
                if (e.status != "ok") std::cerr << "failed: " << e.run_id << ": " << e.error << "\n";
            }
            return res.failures > 0 ? kPartialFailure : kOk;
        }
        if (*report) {
            const auto res = ex::cmd_report(manifest, ex::parse_checkpoints(checkpoints), out);
            for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
            std::cout << res.summary.string() << "\n"
                      << res.plot_regret.string() << "\n"
                      << res.plot_lar.string() << "\n";
            return kOk;
        }
    } catch (const ex::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const ex::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    } catch (const rebmbo::LookupError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const rebmbo::orchestrator::RunFailure& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return kRuntimeError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kRuntimeError;
}
