#ifndef REBMBO_EXPERIMENT_HPP
#define REBMBO_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "rebmbo/config.hpp"
#include "rebmbo/metrics.hpp"
#include "rebmbo/trace.hpp"

namespace rebmbo::experiment {

using Json = nlohmann::json;

/// Schema violation or unreadable config. `path` names the offending key
/// ("ebm.langevin.steps"); empty for whole-document problems.
struct ConfigError : Error {
    ConfigError(const std::string& key_path, const std::string& message);
    std::string path;
};

struct IoError : Error {
    using Error::Error;
};

/// A run configuration plus the sweep settings around it.
struct ExperimentFile {
    RunConfig base;
    std::vector<Method> methods = {Method::rebmbo_c, Method::gp_ucb, Method::random};
    std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
    std::string output_dir = "runs";
    std::vector<int> checkpoints;  // empty: T only
};

Json config_to_json(const RunConfig& config);
/// Strict: unknown keys and wrong types raise ConfigError.
RunConfig config_from_json(const Json& doc);

Json experiment_to_json(const ExperimentFile& file);
ExperimentFile experiment_from_json(const Json& doc);

/// Reads a JSON document. An empty (or whitespace-only) file gives every
/// default. Missing files raise IoError; everything else ConfigError.
ExperimentFile parse_config(const std::filesystem::path& path);
ExperimentFile parse_config_text(const std::string& text);

/// Full-fidelity trace document. Wall-clock times are left out so reruns
/// are byte-identical; they live in the CSV only.
Json trace_to_json(const RunTrace& trace);
RunTrace trace_from_json(const Json& doc);
RunTrace load_trace(const std::filesystem::path& path);
/// Two-space indented JSON with a trailing newline.
std::string dump(const Json& doc);

std::vector<std::string> csv_columns(Eigen::Index dim);
/// Header plus one row per iteration.
std::string trace_csv(const RunTrace& trace);

/// "<benchmark>_<method>_seed<seed>"
std::string file_stem(const RunConfig& config);

struct WrittenRun {
    std::filesystem::path json;
    std::filesystem::path csv;
};

WrittenRun write_trace(const RunTrace& trace, const std::filesystem::path& out_dir);

/// Runs one method and seed and writes its JSON and CSV.
WrittenRun cmd_run(const ExperimentFile& file, Method method, std::uint64_t seed,
                   const std::filesystem::path& out_dir);

struct ManifestEntry {
    std::string run_id;
    std::string method;
    std::uint64_t seed = 0;
    std::string status;  // "ok" or "failed"
    std::string json;    // relative to the manifest; empty when nothing was written
    std::string csv;
    std::string error;
};

struct SweepResult {
    std::filesystem::path manifest;
    std::vector<ManifestEntry> entries;
    int failures = 0;
};

/// Threads from REBMBO_THREADS, else one per seed.
int sweep_threads(std::size_t seeds);

/// Every method x seed, written under out_dir, plus manifest.json (or
/// `manifest` when non-empty). Failed runs leave a partial trace.
SweepResult cmd_sweep(const ExperimentFile& file, const std::filesystem::path& out_dir, int threads,
                      const std::filesystem::path& manifest = {});

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

struct ReportResult {
    std::filesystem::path summary;
    std::filesystem::path plot_regret;
    std::filesystem::path plot_lar;
    std::vector<metrics::Summary> summaries;
    std::vector<std::string> warnings;
};

/// summary.csv, plot_regret.csv and plot_lar.csv next to the manifest
/// (or in out_dir when given).
ReportResult cmd_report(const std::filesystem::path& manifest, const std::vector<int>& checkpoints,
                        const std::filesystem::path& out_dir = {});

/// Parses "10,20,30".
std::vector<int> parse_checkpoints(const std::string& text);

}  // namespace rebmbo::experiment

#endif  // REBMBO_EXPERIMENT_HPP
