#ifndef REBMBO_CONFIG_HPP
#define REBMBO_CONFIG_HPP

#include <cstdint>
#include <string>

#include "rebmbo/acquisition.hpp"
#include "rebmbo/agent.hpp"
#include "rebmbo/ebm.hpp"
#include "rebmbo/gp.hpp"

namespace rebmbo {

enum class Method { rebmbo_c, rebmbo_s, rebmbo_d, gp_ucb, random };

std::string to_string(Method m);
/// Accepts "rebmbo-c", "rebmbo-s", "rebmbo-d", "gp-ucb", "random".
Method parse_method(const std::string& name);

struct GpSettings {
    double amplitude = 1.0;
    double lengthscale = 0.2;  // initial value for every lengthscale, unit-box coordinates
    double w_rbf = 0.5;
    double w_matern = 0.5;
    double noise = gp::kDefaultNoise;
    int hyper_budget = 200;
    int hyper_starts = 4;
    // Refit hyperparameters every iteration up to this many observations,
    // then every `refit_every` iterations.
    int refit_threshold = 100;
    int refit_every = 5;
    Eigen::Index sparse_inducing = 32;  // capped at n
    gp::DeepConfig deep;
};

struct RunConfig {
    std::string benchmark = "branin";
    Eigen::Index dim = 0;  // 0: the benchmark's default
    Method method = Method::rebmbo_c;
    int iterations = 30;
    int initial_design = 0;  // 0: max(5, 2d) capped at 20
    std::uint64_t seed = 0;
    GpSettings gp;
    ebm::EbmConfig ebm;
    acquisition::AcquisitionConfig acquisition;
    agent::PpoConfig ppo;
    int warmup = 5;
    bool always_acquisition = false;  // never hand selection to the policy
    double lar_alpha = 0.3;

    /// Throws ParameterError on any out-of-range field.
    void validate() const;
    /// Copy with dim, initial_design and the candidate count made explicit.
    [[nodiscard]] RunConfig resolved() const;
};

int default_initial_design(Eigen::Index dim);

}  // namespace rebmbo

#endif  // REBMBO_CONFIG_HPP
