#include "rebmbo/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>

#include "rebmbo/acquisition.hpp"
#include "rebmbo/agent.hpp"
#include "rebmbo/benchmarks.hpp"
#include "rebmbo/ebm.hpp"
#include "rebmbo/metrics.hpp"

namespace rebmbo::orchestrator {

namespace {

enum Stream : std::uint64_t {
    kDesign = 1,
    kEbmInit,
    kEbmTrain,
    kAcquisition,
    kPolicyInit,
    kPolicyAct,
    kPpo,
    kHyper,
    kSurrogate,
    kRandom,
};

enum class Mode { rebmbo, gp_ucb, random };

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

struct RunState {
    RunConfig config;
    benchmarks::BenchmarkSpec spec;
    RunTrace trace;
    Dataset data;
    MemoizedObjective objective;
    double best_y = -INFINITY;
};

RunState start_run(const RunConfig& raw, Objective objective, const std::vector<Method>& allowed) {
    const RunConfig config = raw.resolved();
    if (std::find(allowed.begin(), allowed.end(), config.method) == allowed.end()) {
        throw ParameterError("method " + to_string(config.method) + " cannot be run by this driver");
    }
    auto spec = benchmarks::lookup(config.benchmark, static_cast<std::size_t>(config.dim));
    if (!objective) objective = [spec](const Vector& x) { return spec.evaluate(x); };

    RunState s{config, spec, {}, Dataset(spec.box), MemoizedObjective(std::move(objective)), -INFINITY};
    s.trace.run_id = make_run_id(config);
    s.trace.config = config;
    s.trace.benchmark = spec;
    s.trace.x_star = spec.optimizer_points.empty() ? Vector() : spec.optimizer_points.front();

    Rng design_rng = make_stream(config.seed, kDesign);
    const Matrix X0 = latin_hypercube(spec.box, config.initial_design, design_rng);
    s.trace.initial_x = X0;
    for (Eigen::Index i = 0; i < X0.rows(); ++i) {
        const Vector x = X0.row(i).transpose();
        const auto [y, hit] = s.objective(x);
        s.trace.initial_y.push_back(y);
        if (!hit) s.data.add(x, y);
        s.best_y = std::max(s.best_y, y);
    }
    s.trace.evaluations = s.objective.calls();
    return s;
}

void finish_record(RunState& s, IterationRecord& rec, const Vector& x, double y, bool hit) {
    rec.x = x;
    rec.y = y;
    rec.memo_hit = hit;
    if (!hit) s.data.add(x, y);
    s.best_y = std::max(s.best_y, y);
    rec.best_y = s.best_y;
    rec.regret_inst = metrics::instantaneous_regret(s.spec.optimum_value, y);
    rec.regret_simple = metrics::instantaneous_regret(s.spec.optimum_value, s.best_y);
    if (rec.energy_raw && rec.energy_opt) {
        rec.lar = rec.regret_inst + s.config.lar_alpha * (*rec.energy_opt - *rec.energy_raw);
    }
    s.trace.evaluations = s.objective.calls();
}

bool refit_due(const RunConfig& c, std::size_t n, int t) {
    if (c.dim > 20) return (t - 1) % c.gp.refit_every == 0;
    return static_cast<int>(n) <= c.gp.refit_threshold || (t - 1) % c.gp.refit_every == 0;
}

RunTrace run_loop(const RunConfig& raw, Objective objective, Mode mode) {
    std::vector<Method> allowed = {Method::rebmbo_c, Method::rebmbo_s, Method::rebmbo_d};
    if (mode == Mode::gp_ucb) allowed = {Method::gp_ucb};
    if (mode == Mode::random) allowed = {Method::random};
    RunState s = start_run(raw, std::move(objective), allowed);
    const RunConfig& c = s.config;
    const Box& box = s.spec.box;
    const int T = c.iterations;

    std::optional<ebm::EnergyModel> energy;
    std::optional<agent::PolicyState> policy;
    if (mode == Mode::rebmbo) {
        energy = ebm::make_energy_model(box, c.ebm, make_stream(c.seed, kEbmInit)());
        policy = agent::make_policy(box, c.ppo, make_stream(c.seed, kPolicyInit)());
    }
    acquisition::AcquisitionConfig acq = c.acquisition;
    if (mode == Mode::gp_ucb) acq.gamma = 0.0;

    Rng ebm_rng = make_stream(c.seed, kEbmTrain);
    Rng acq_rng = make_stream(c.seed, kAcquisition);
    Rng act_rng = make_stream(c.seed, kPolicyAct);
    Rng ppo_rng = make_stream(c.seed, kPpo);
    Rng random_rng = make_stream(c.seed, kRandom);

    const gp::Variant variant = mode == Mode::random ? gp::Variant::exact : select_variant(c.method);
    kernels::KernelParams params = initial_kernel(c, box.dim());

    for (int t = 1; t <= T; ++t) {
        const auto t0 = std::chrono::steady_clock::now();
        IterationRecord rec;
        rec.t = t;
        try {
            if (mode == Mode::random) {
                Vector u(box.dim());
                for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = uniform01(random_rng);
                const Vector x = box.from_unit(u);
                rec.selector = "random";
                const auto [y, hit] = s.objective(x);
                finish_record(s, rec, x, y, hit);
                rec.wall_ms = elapsed_ms(t0);
                s.trace.records.push_back(std::move(rec));
                continue;
            }

            // (A) surrogate
            if (variant != gp::Variant::deep && refit_due(c, s.data.size(), t)) {
                const auto h = gp::optimize_hyperparams(s.data, params, c.gp.noise, c.gp.hyper_budget,
                                                        c.gp.hyper_starts, make_stream(c.seed, kHyper, t)());
                params = h.params;
            }
            const gp::GpModel model = fit_surrogate(variant, s.data, params, c, make_stream(c.seed, kSurrogate, t)());
            if (variant == gp::Variant::exact) rec.log_likelihood = model.log_marginal_likelihood();

            // (B) energy model on the observed inputs
            if (energy) {
                const auto steps = ebm::train_epochs(*energy, s.data.inputs(), c.ebm.epochs, c.ebm.batch_size, ebm_rng);
                EbmSummary es;
                for (const auto& d : steps) {
                    es.mean_positive += d.mean_positive;
                    es.mean_negative += d.mean_negative;
                    es.skipped += d.skipped ? 1 : 0;
                    es.reinitialized += d.reinitialized;
                }
                es.steps = static_cast<int>(steps.size());
                if (es.steps > 0) {
                    es.mean_positive /= es.steps;
                    es.mean_negative /= es.steps;
                }
                rec.ebm = es;
            }

            // (C) state, (D) selection
            Vector state;
            if (policy) state = agent::featurize(model, &*energy, policy->probes, s.best_y, t, T);
            Vector x;
            agent::Transition tr;
            const bool use_policy = policy && !c.always_acquisition && t > c.warmup;
            if (use_policy) {
                const agent::Action act = agent::act(*policy, state, act_rng, box);
                x = act.x;
                tr.z = act.z;
                tr.logp = act.logp;
                rec.selector = "policy";
            } else {
                const acquisition::Choice choice =
                    acquisition::maximize(model, energy ? &*energy : nullptr, box, acq, acq_rng);
                x = choice.x;
                rec.acquisition_score = choice.score;
                rec.selector = "acquisition";
                if (policy) {
                    tr.z = box.to_symmetric(x);
                    const agent::Head head = agent::policy_head(*policy, state);
                    tr.logp = agent::gaussian_log_density(tr.z, head.mean, head.log_std);
                }
            }

            // (E) evaluate
            const auto [y, hit] = s.objective(x);

            // (F) reward and policy update
            if (energy) {
                const Vector probe_e = ebm::energy_batch(*energy, policy->probes);
                const double e = ebm::energy(*energy, x);
                Vector ref(probe_e.size() + 1);
                ref << probe_e, e;
                const double e_norm = ebm::EnergyScale::from(ref)(e);
                rec.energy_raw = e;
                rec.energy_norm = e_norm;
                if (s.trace.x_star.size() == box.dim()) rec.energy_opt = ebm::energy(*energy, s.trace.x_star);
                tr.state = state;
                tr.reward = agent::reward(model.standardize(y), e_norm, c.ppo.lambda);
                tr.value = agent::value(*policy, state);
                rec.reward = tr.reward;
                policy->buffer.push_back(std::move(tr));
                rec.ppo = agent::ppo_update(*policy, ppo_rng);
            }

            // (G) record
            finish_record(s, rec, x, y, hit);
        } catch (const Error& e) {
            s.trace.status = "failed";
            s.trace.error = "iteration " + std::to_string(t) + ": " + e.what();
            throw RunFailure(s.trace.error, s.trace);
        }
        rec.wall_ms = elapsed_ms(t0);
        s.trace.records.push_back(std::move(rec));
    }
    return s.trace;
}

}  // namespace

std::pair<double, bool> MemoizedObjective::operator()(const Vector& x) {
    for (const auto& [seen_x, y] : seen_) {
        if (seen_x.size() != x.size()) continue;
        bool same = true;
        for (Eigen::Index i = 0; i < x.size() && same; ++i) same = std::abs(seen_x[i] - x[i]) <= tol_;
        if (same) return {y, true};
    }
    const double y = f_(x);
    if (!std::isfinite(y)) throw NumericalError("objective returned a non-finite value");
    ++calls_;
    seen_.emplace_back(x, y);
    return {y, false};
}

Rng make_stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(index)};
    return Rng(seq);
}

gp::Variant select_variant(Method method) {
    switch (method) {
        case Method::rebmbo_c:
        case Method::gp_ucb:
            return gp::Variant::exact;
        case Method::rebmbo_s:
            return gp::Variant::sparse;
        case Method::rebmbo_d:
            return gp::Variant::deep;
        case Method::random:
            break;
    }
    throw UnsupportedError("method " + to_string(method) + " has no surrogate");
}

kernels::KernelParams initial_kernel(const RunConfig& config, Eigen::Index dim) {
    kernels::KernelParams p = kernels::KernelParams::defaults(dim, config.gp.lengthscale);
    p.amplitude = config.gp.amplitude;
    p.w_rbf = config.gp.w_rbf;
    p.w_matern = config.gp.w_matern;
    return p;
}

gp::GpModel fit_surrogate(gp::Variant variant, const Dataset& data, const kernels::KernelParams& params,
                          const RunConfig& config, std::uint64_t seed) {
    switch (variant) {
        case gp::Variant::exact:
            return gp::fit_exact(data, params, config.gp.noise);
        case gp::Variant::sparse: {
            const auto m = std::min<Eigen::Index>(config.gp.sparse_inducing, static_cast<Eigen::Index>(data.size()));
            return gp::fit_sparse(data, m, params, config.gp.noise, seed);
        }
        case gp::Variant::deep: {
            gp::DeepConfig deep = config.gp.deep;
            deep.seed = seed;
            return gp::fit_deep(data, deep);
        }
    }
    throw UnsupportedError("unknown surrogate variant");
}

RunTrace run_rebmbo(const RunConfig& config, Objective objective) {
    return run_loop(config, std::move(objective), Mode::rebmbo);
}

RunTrace run_gp_ucb(const RunConfig& config, Objective objective) {
    return run_loop(config, std::move(objective), Mode::gp_ucb);
}

RunTrace run_random(const RunConfig& config, Objective objective) {
    return run_loop(config, std::move(objective), Mode::random);
}

RunTrace run(const RunConfig& config, Objective objective) {
    switch (config.method) {
        case Method::rebmbo_c:
        case Method::rebmbo_s:
        case Method::rebmbo_d:
            return run_rebmbo(config, std::move(objective));
        case Method::gp_ucb:
            return run_gp_ucb(config, std::move(objective));
        case Method::random:
            return run_random(config, std::move(objective));
    }
    throw UnsupportedError("unknown method");
}

}  // namespace rebmbo::orchestrator
