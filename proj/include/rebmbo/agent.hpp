#ifndef REBMBO_AGENT_HPP
#define REBMBO_AGENT_HPP

#include <cstdint>
#include <vector>

#include "rebmbo/common.hpp"
#include "rebmbo/ebm.hpp"
#include "rebmbo/gp.hpp"
#include "rebmbo/net.hpp"

namespace rebmbo::agent {

struct PpoConfig {
    Eigen::Index hidden = 256;
    double learning_rate = 3e-4;
    double clip = 0.2;
    double discount = 0.99;
    double value_coef = 0.5;
    double entropy_coef = 0.01;
    int epochs = 4;
    Eigen::Index minibatch = 64;
    double max_grad_norm = 0.5;
    double init_log_std = -1.0;  // bias of the log-std head at initialization
    double lambda = 0.35;        // reward energy weight
    Eigen::Index probes = 16;
    // Re-evaluate logp_old and V under the pre-update networks at the start
    // of every update, so the clip bounds each update rather than the
    // drift since a record was collected.
    bool refresh_old = true;

    void validate() const;
};

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

/// s = (mu_1, sigma_1, E_1, ..., mu_P, sigma_P, E_P, best_y, t / T), with
/// mu, sigma and best_y on the surrogate's standardized scale and E
/// min-max normalized over the probes.
Vector featurize(const gp::GpModel& model, const ebm::EnergyModel* energy, const Matrix& probes, double best_y,
                 int t, int T);

inline Eigen::Index state_dim(Eigen::Index probes) { return 3 * probes + 2; }

struct Transition {
    Vector state;
    Vector z;  // pre-clamp action in [-1, 1] coordinates
    double logp = 0.0;
    double reward = 0.0;
    double value = 0.0;
};

struct PolicyState {
    net::MlpParams actor;   // state -> (mean, log-std), 2 * action_dim outputs
    net::MlpParams critic;  // state -> value
    net::AdamState actor_opt;
    net::AdamState critic_opt;
    std::vector<Transition> buffer;
    Matrix probes;  // P x d, original units
    PpoConfig config;
    Eigen::Index action_dim = 0;
};

PolicyState make_policy(const Box& box, const PpoConfig& config, std::uint64_t seed);

struct Head {
    Vector mean;
    Vector log_std;  // already clamped
};

Head policy_head(const PolicyState& policy, const Vector& state);
double value(const PolicyState& policy, const Vector& state);

/// Diagonal Gaussian log density, summed over dimensions.
double gaussian_log_density(const Vector& z, const Vector& mean, const Vector& log_std);

struct Action {
    Vector x;  // in the box
    Vector z;  // pre-clamp sample
    double logp = 0.0;
};

Action act(const PolicyState& policy, const Vector& state, Rng& rng, const Box& box);

double reward(double y_standardized, double energy_norm, double lambda);

struct ReturnsAdvantages {
    Vector returns;
    Vector advantages;
};

ReturnsAdvantages returns_and_advantages(const std::vector<Transition>& buffer, double discount);

double clip_objective(double ratio, double advantage, double epsilon);

struct LossTerms {
    double actor = 0.0;    // -mean clipped objective - entropy_coef * mean entropy
    double critic = 0.0;   // 0.5 * mean (V - G)^2 (before value_coef)
    double entropy = 0.0;  // mean entropy
    double mean_ratio = 0.0;
    double clip_fraction = 0.0;
    net::Gradients actor_grad;
    net::Gradients critic_grad;  // of value_coef * critic
};

/// Loss and gradients over the records in `index` with fixed targets.
LossTerms ppo_loss(const PolicyState& policy, const std::vector<Transition>& buffer, const std::vector<std::size_t>& index,
                   const ReturnsAdvantages& targets);

struct UpdateDiagnostics {
    double actor_loss = 0.0;
    double critic_loss = 0.0;
    double entropy = 0.0;
    double mean_ratio = 1.0;
    double clip_fraction = 0.0;
    int aborted_epochs = 0;
    int minibatches = 0;
};

/// Clipped-objective epochs over policy.buffer. Diagnostics average the
/// minibatches of the final completed epoch.
UpdateDiagnostics ppo_update(PolicyState& policy, Rng& rng);

}  // namespace rebmbo::agent

#endif  // REBMBO_AGENT_HPP
