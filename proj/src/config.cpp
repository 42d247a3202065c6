#include "rebmbo/config.hpp"

#include <algorithm>

#include "rebmbo/benchmarks.hpp"

namespace rebmbo {

std::string to_string(Method m) {
    switch (m) {
        case Method::rebmbo_c:
            return "rebmbo-c";
        case Method::rebmbo_s:
            return "rebmbo-s";
        case Method::rebmbo_d:
            return "rebmbo-d";
        case Method::gp_ucb:
            return "gp-ucb";
        case Method::random:
            return "random";
    }
    return "unknown";
}

Method parse_method(const std::string& name) {
    for (Method m : {Method::rebmbo_c, Method::rebmbo_s, Method::rebmbo_d, Method::gp_ucb, Method::random}) {
        if (to_string(m) == name) return m;
    }
    throw LookupError("unknown method '" + name + "' (expected rebmbo-c, rebmbo-s, rebmbo-d, gp-ucb or random)");
}

int default_initial_design(Eigen::Index dim) {
    return static_cast<int>(std::min<Eigen::Index>(std::max<Eigen::Index>(5, 2 * dim), 20));
}

void RunConfig::validate() const {
    if (dim < 0) throw ParameterError("dim must be >= 0");
    if (iterations < 1) throw ParameterError("iterations must be >= 1");
    if (initial_design < 0) throw ParameterError("initial_design must be >= 1 (or 0 for the default)");
    if (warmup < 0) throw ParameterError("warmup must be >= 0");
    if (warmup > iterations) throw ParameterError("warmup must not exceed iterations");
    if (!(lar_alpha >= 0.0)) throw ParameterError("lar_alpha must be nonnegative");

    if (!(gp.amplitude > 0.0) || !(gp.lengthscale > 0.0)) {
        throw ParameterError("gp amplitude and lengthscale must be positive");
    }
    if (!(gp.w_rbf >= 0.0) || !(gp.w_matern >= 0.0) || !(gp.w_rbf + gp.w_matern > 0.0)) {
        throw ParameterError("gp mixture weights must be nonnegative with a positive sum");
    }
    if (!(gp.noise > 0.0)) throw ParameterError("gp noise must be positive");
    if (gp.hyper_budget < 1 || gp.hyper_starts < 1) throw ParameterError("gp hyper_budget and hyper_starts must be >= 1");
    if (gp.refit_threshold < 0 || gp.refit_every < 1) throw ParameterError("invalid gp refit cadence");
    if (gp.sparse_inducing < 1) throw ParameterError("gp sparse_inducing must be >= 1");
    if (gp.deep.feature_dim < 1 || gp.deep.hidden < 1 || gp.deep.epochs < 1) {
        throw ParameterError("invalid deep-feature network settings");
    }
    if (!(gp.deep.beta > 0.0) || !(gp.deep.prior_precision > 0.0) || !(gp.deep.learning_rate >= 0.0)) {
        throw ParameterError("deep-feature precisions must be positive");
    }

    ebm.validate();
    acquisition.validate();
    ppo.validate();
}

RunConfig RunConfig::resolved() const {
    validate();
    RunConfig r = *this;
    const auto spec = benchmarks::lookup(benchmark, dim > 0 ? std::optional<std::size_t>(static_cast<std::size_t>(dim))
                                                          : std::nullopt);
    r.dim = static_cast<Eigen::Index>(spec.dim);
    if (r.initial_design == 0) r.initial_design = default_initial_design(r.dim);
    r.acquisition.n_candidates = r.acquisition.candidates_for(r.dim);
    return r;
}

}  // namespace rebmbo
