#include "rebmbo/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace rebmbo {

std::string make_run_id(const RunConfig& config) {
    return config.benchmark + "-" + to_string(config.method) + "-s" + std::to_string(config.seed);
}

}  // namespace rebmbo

namespace rebmbo::metrics {

double instantaneous_regret(double f_opt, double y) { return f_opt - y; }

std::vector<double> simple_regret(const std::vector<double>& ys, double f_opt, std::optional<double> prior_best) {
    std::vector<double> out;
    out.reserve(ys.size());
    double best = prior_best ? instantaneous_regret(f_opt, *prior_best) : INFINITY;
    for (double y : ys) {
        best = std::min(best, instantaneous_regret(f_opt, y));
        out.push_back(best);
    }
    return out;
}

namespace {

std::vector<double> trace_ys(const RunTrace& trace) {
    std::vector<double> ys;
    ys.reserve(trace.records.size());
    for (const auto& r : trace.records) ys.push_back(r.y);
    return ys;
}

}  // namespace

std::vector<double> simple_regret(const RunTrace& trace) {
    std::optional<double> prior;
    if (!trace.initial_y.empty()) prior = *std::max_element(trace.initial_y.begin(), trace.initial_y.end());
    return simple_regret(trace_ys(trace), trace.benchmark.optimum_value, prior);
}

std::vector<double> instantaneous_series(const RunTrace& trace) {
    std::vector<double> out;
    for (const auto& r : trace.records) out.push_back(instantaneous_regret(trace.benchmark.optimum_value, r.y));
    return out;
}

std::vector<double> lar(const std::vector<double>& ys, double f_opt, const std::vector<double>& energy_at_opt,
                        const std::vector<double>& energy_at_x, double alpha) {
    if (energy_at_opt.size() != ys.size() || energy_at_x.size() != ys.size()) {
        throw InputError("LAR needs one energy pair per iteration");
    }
    std::vector<double> out(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) {
        out[i] = instantaneous_regret(f_opt, ys[i]) + alpha * (energy_at_opt[i] - energy_at_x[i]);
    }
    return out;
}

std::vector<double> lar(const RunTrace& trace, double alpha) {
    std::vector<double> eo, ex;
    for (const auto& r : trace.records) {
        if (!r.energy_raw || !r.energy_opt) throw InputError("trace " + trace.run_id + " carries no energy data");
        ex.push_back(*r.energy_raw);
        eo.push_back(*r.energy_opt);
    }
    return lar(trace_ys(trace), trace.benchmark.optimum_value, eo, ex, alpha);
}

RegretSeries regret_series(const RunTrace& trace, double alpha) {
    RegretSeries s;
    s.alpha = alpha;
    s.instantaneous = instantaneous_series(trace);
    double acc = 0.0;
    for (double r : s.instantaneous) {
        acc += r;
        s.cumulative.push_back(acc);
    }
    s.simple = simple_regret(trace);
    const bool has_energy = !trace.records.empty() && std::all_of(trace.records.begin(), trace.records.end(),
                                                                  [](const auto& r) { return r.energy_raw && r.energy_opt; });
    if (has_energy) s.lar = lar(trace, alpha);
    return s;
}

MeanStd mean_std(const std::vector<double>& values) {
    if (values.empty()) throw InputError("mean of an empty sample");
    MeanStd m;
    for (double v : values) m.mean += v;
    m.mean /= static_cast<double>(values.size());
    if (values.size() >= 2) {
        double ss = 0.0;
        for (double v : values) ss += (v - m.mean) * (v - m.mean);
        m.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return m;
}

Summary summarize(const std::vector<RunTrace>& traces, const std::vector<int>& checkpoints, double alpha) {
    if (traces.empty()) throw InputError("summarize needs at least one trace");
    const RunTrace& first = traces.front();
    const auto T = static_cast<int>(first.records.size());
    for (const auto& tr : traces) {
        if (tr.config.method != first.config.method || tr.config.benchmark != first.config.benchmark ||
            tr.config.dim != first.config.dim || static_cast<int>(tr.records.size()) != T) {
            throw InputError("summarize needs traces with identical method, benchmark, dim and length");
        }
    }
    if (T == 0) throw InputError("summarize needs non-empty traces");

    Summary s;
    s.method = to_string(first.config.method);
    s.benchmark = first.config.benchmark;
    s.dim = first.config.dim;
    s.single_run = traces.size() == 1;

    std::vector<int> points;
    for (int c : checkpoints) {
        if (c < 1) throw InputError("checkpoints must be >= 1");
        if (c > T) {
            s.warnings.push_back("checkpoint " + std::to_string(c) + " clamped to T = " + std::to_string(T));
            c = T;
        }
        points.push_back(c);
    }
    if (points.empty()) points.push_back(T);

    std::vector<RegretSeries> series;
    bool all_lar = true;
    for (const auto& tr : traces) {
        series.push_back(regret_series(tr, alpha));
        all_lar = all_lar && series.back().lar.has_value();
    }
    if (all_lar) s.lar.emplace();
    for (int c : points) {
        std::vector<double> sr, lr;
        for (const auto& rs : series) {
            sr.push_back(rs.simple[static_cast<std::size_t>(c - 1)]);
            if (all_lar) lr.push_back((*rs.lar)[static_cast<std::size_t>(c - 1)]);
        }
        const MeanStd a = mean_std(sr);
        s.simple_regret.push_back({c, a.mean, a.std, static_cast<int>(sr.size())});
        if (all_lar) {
            const MeanStd b = mean_std(lr);
            s.lar->push_back({c, b.mean, b.std, static_cast<int>(lr.size())});
        }
    }
    return s;
}

}  // namespace rebmbo::metrics
