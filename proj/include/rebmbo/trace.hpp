#ifndef REBMBO_TRACE_HPP
#define REBMBO_TRACE_HPP

#include <optional>
#include <string>
#include <vector>

#include "rebmbo/agent.hpp"
#include "rebmbo/benchmarks.hpp"
#include "rebmbo/common.hpp"
#include "rebmbo/config.hpp"

namespace rebmbo {

struct EbmSummary {
    double mean_positive = 0.0;  // averaged over the iteration's train steps
    double mean_negative = 0.0;
    int steps = 0;
    int skipped = 0;
    int reinitialized = 0;
};

struct IterationRecord {
    int t = 0;
    Vector x;
    double y = 0.0;
    double best_y = 0.0;
    std::string selector;  // "acquisition", "policy" or "random"
    bool memo_hit = false;
    std::optional<double> energy_raw;
    std::optional<double> energy_norm;
    std::optional<double> energy_opt;  // E at x* on the same snapshot
    std::optional<double> reward;
    double regret_inst = 0.0;
    double regret_simple = 0.0;
    std::optional<double> lar;
    std::optional<double> acquisition_score;
    std::optional<double> log_likelihood;  // exact variant fits only
    std::optional<EbmSummary> ebm;
    std::optional<agent::UpdateDiagnostics> ppo;
    double wall_ms = 0.0;
};

/// Everything one seeded run produced. `benchmark` and `x_star` describe
/// the optimum used for regret and LAR.
struct RunTrace {
    std::string run_id;
    RunConfig config;  // resolved
    benchmarks::BenchmarkSpec benchmark;
    Vector x_star;
    Matrix initial_x;  // n0 x d
    std::vector<double> initial_y;
    std::vector<IterationRecord> records;
    int evaluations = 0;  // objective calls, memo hits excluded
    std::string status = "ok";
    std::string error;
};

/// "<benchmark>-<method>-s<seed>"
std::string make_run_id(const RunConfig& config);

}  // namespace rebmbo

#endif  // REBMBO_TRACE_HPP
