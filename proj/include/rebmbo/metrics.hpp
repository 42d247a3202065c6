#ifndef REBMBO_METRICS_HPP
#define REBMBO_METRICS_HPP

#include <optional>
#include <string>
#include <vector>

#include "rebmbo/trace.hpp"

namespace rebmbo::metrics {

inline constexpr double kDefaultLarAlpha = 0.3;

double instantaneous_regret(double f_opt, double y);

/// Running minimum of f_opt - y. `prior_best`, when given, seeds the
/// minimum (the best y of the initial design).
std::vector<double> simple_regret(const std::vector<double>& ys, double f_opt,
                                  std::optional<double> prior_best = std::nullopt);
std::vector<double> simple_regret(const RunTrace& trace);

/// [f_opt - y_t] + alpha [E(x*)_t - E(x_t)].
std::vector<double> lar(const std::vector<double>& ys, double f_opt, const std::vector<double>& energy_at_opt,
                        const std::vector<double>& energy_at_x, double alpha);
/// Throws InputError when the trace carries no energies.
std::vector<double> lar(const RunTrace& trace, double alpha);

std::vector<double> instantaneous_series(const RunTrace& trace);

struct RegretSeries {
    std::vector<double> instantaneous;
    std::vector<double> cumulative;
    std::vector<double> simple;
    std::optional<std::vector<double>> lar;
    double alpha = kDefaultLarAlpha;
};

RegretSeries regret_series(const RunTrace& trace, double alpha = kDefaultLarAlpha);

struct CheckpointStat {
    int t = 0;
    double mean = 0.0;
    double std = 0.0;
    int count = 0;
};

struct Summary {
    std::string method;
    std::string benchmark;
    Eigen::Index dim = 0;
    bool single_run = false;  // std reported as 0 by convention
    std::vector<CheckpointStat> simple_regret;
    std::optional<std::vector<CheckpointStat>> lar;
    std::vector<std::string> warnings;
};

/// Sample mean and (n-1) std of simple regret and LAR at each checkpoint
/// (1-based iteration). Checkpoints beyond T are clamped to T with a
/// warning. Traces must share method, benchmark, dim and T.
Summary summarize(const std::vector<RunTrace>& traces, const std::vector<int>& checkpoints,
                  double alpha = kDefaultLarAlpha);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};
MeanStd mean_std(const std::vector<double>& values);

}  // namespace rebmbo::metrics

#endif  // REBMBO_METRICS_HPP
