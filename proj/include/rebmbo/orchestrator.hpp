#ifndef REBMBO_ORCHESTRATOR_HPP
#define REBMBO_ORCHESTRATOR_HPP

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "rebmbo/config.hpp"
#include "rebmbo/gp.hpp"
#include "rebmbo/trace.hpp"

namespace rebmbo::orchestrator {

using Objective = std::function<double(const Vector&)>;

/// Wraps an objective so a point within 1e-12 (max-norm) of an earlier
/// query reuses the stored value instead of calling again.
class MemoizedObjective {
public:
    explicit MemoizedObjective(Objective f, double tolerance = 1e-12) : f_(std::move(f)), tol_(tolerance) {}

    /// (value, cache hit)
    std::pair<double, bool> operator()(const Vector& x);
    [[nodiscard]] int calls() const { return calls_; }

private:
    Objective f_;
    double tol_;
    std::vector<std::pair<Vector, double>> seen_;
    int calls_ = 0;
};

/// Independent, reproducible random stream for one component of a run.
Rng make_stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index = 0);

/// C -> exact, S -> sparse, D -> deep. gp-ucb uses the exact model;
/// random has none.
gp::Variant select_variant(Method method);

/// Fits the surrogate for `variant` with the given kernel parameters; the
/// sparse variant uses min(m, n) inducing points.
gp::GpModel fit_surrogate(gp::Variant variant, const Dataset& data, const kernels::KernelParams& params,
                          const RunConfig& config, std::uint64_t seed);

kernels::KernelParams initial_kernel(const RunConfig& config, Eigen::Index dim);

/// Thrown when a run aborts; carries the trace up to the failure.
struct RunFailure : Error {
    RunFailure(const std::string& what, RunTrace partial_trace) : Error(what), partial(std::move(partial_trace)) {}
    RunTrace partial;
};

/// Objective defaults to the benchmark's own (maximized) function.
RunTrace run_rebmbo(const RunConfig& config, Objective objective = nullptr);
RunTrace run_gp_ucb(const RunConfig& config, Objective objective = nullptr);
RunTrace run_random(const RunConfig& config, Objective objective = nullptr);
/// Dispatches on config.method.
RunTrace run(const RunConfig& config, Objective objective = nullptr);

}  // namespace rebmbo::orchestrator

#endif  // REBMBO_ORCHESTRATOR_HPP
