#include "rebmbo/agent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace rebmbo::agent {

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

}  // namespace

void PpoConfig::validate() const {
    if (hidden < 1) throw ParameterError("ppo hidden width must be >= 1");
    if (!(learning_rate > 0.0)) throw ParameterError("ppo learning rate must be positive");
    if (!(clip > 0.0 && clip < 1.0)) throw ParameterError("ppo clip must lie in (0, 1)");
    if (!(discount >= 0.0 && discount <= 1.0)) throw ParameterError("ppo discount must lie in [0, 1]");
    if (!(value_coef >= 0.0) || !(entropy_coef >= 0.0)) throw ParameterError("ppo coefficients must be nonnegative");
    if (epochs < 1) throw ParameterError("ppo epochs must be >= 1");
    if (minibatch < 1) throw ParameterError("ppo minibatch must be >= 1");
    if (!(max_grad_norm > 0.0)) throw ParameterError("ppo max_grad_norm must be positive");
    if (!(init_log_std >= kLogStdMin && init_log_std <= kLogStdMax)) {
        throw ParameterError("ppo init_log_std must lie in [-5, 2]");
    }
    if (!(lambda >= 0.0)) throw ParameterError("reward lambda must be nonnegative");
    if (probes < 1) throw ParameterError("probe count must be >= 1");
}

Vector featurize(const gp::GpModel& model, const ebm::EnergyModel* energy, const Matrix& probes, double best_y,
                 int t, int T) {
    if (T < 1 || t < 1 || t > T) throw InputError("featurize needs 1 <= t <= T");
    const Eigen::Index P = probes.rows();
    Vector s(state_dim(P));
    Vector e = Vector::Zero(P);
    if (energy) e = ebm::normalize_energies(ebm::energy_batch(*energy, probes));
    for (Eigen::Index i = 0; i < P; ++i) {
        const gp::Prediction p = model.predict_standardized(probes.row(i).transpose());
        s[3 * i] = p.mean;
        s[3 * i + 1] = std::sqrt(std::max(0.0, p.variance));
        s[3 * i + 2] = e[i];
    }
    s[3 * P] = model.standardize(best_y);
    s[3 * P + 1] = static_cast<double>(t) / static_cast<double>(T);
    return s;
}

PolicyState make_policy(const Box& box, const PpoConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng(seed);
    PolicyState p;
    p.config = config;
    p.action_dim = box.dim();
    p.probes = latin_hypercube(box, config.probes, rng);
    const Eigen::Index in = state_dim(config.probes);
    const Eigen::Index h = config.hidden;
    p.actor = net::init_params({in, h, h, 2 * p.action_dim}, net::Activation::relu, net::Activation::identity, rng);
    p.critic = net::init_params({in, h, h, 1}, net::Activation::relu, net::Activation::identity, rng);
    // Start near a centred, moderately wide Gaussian.
    auto& head = p.actor.layers.back();
    head.weight *= 0.01;
    head.bias.tail(p.action_dim).setConstant(config.init_log_std);
    p.actor_opt = net::make_adam(p.actor, config.learning_rate);
    p.critic_opt = net::make_adam(p.critic, config.learning_rate);
    return p;
}

Head policy_head(const PolicyState& policy, const Vector& state) {
    const Vector out = net::forward(policy.actor, state);
    const Eigen::Index d = policy.action_dim;
    return {out.head(d), out.tail(d).cwiseMax(kLogStdMin).cwiseMin(kLogStdMax)};
}

double value(const PolicyState& policy, const Vector& state) { return net::forward(policy.critic, state)[0]; }

double gaussian_log_density(const Vector& z, const Vector& mean, const Vector& log_std) {
    double lp = 0.0;
    for (Eigen::Index j = 0; j < z.size(); ++j) {
        const double u = (z[j] - mean[j]) / std::exp(log_std[j]);
        lp += -0.5 * u * u - log_std[j] - kHalfLog2Pi;
    }
    return lp;
}

Action act(const PolicyState& policy, const Vector& state, Rng& rng, const Box& box) {
    if (box.dim() != policy.action_dim) throw InputError("action box dimension does not match the policy");
    const Head h = policy_head(policy, state);
    Action a;
    a.z = h.mean;
    for (Eigen::Index j = 0; j < a.z.size(); ++j) a.z[j] += std::exp(h.log_std[j]) * standard_normal(rng);
    a.logp = gaussian_log_density(a.z, h.mean, h.log_std);
    a.x = box.clamp(box.from_symmetric(a.z.cwiseMax(-1.0).cwiseMin(1.0)));
    return a;
}

double reward(double y_standardized, double energy_norm, double lambda) {
    return y_standardized - lambda * energy_norm;
}

ReturnsAdvantages returns_and_advantages(const std::vector<Transition>& buffer, double discount) {
    if (buffer.empty()) throw InputError("returns need a non-empty buffer");
    const auto n = static_cast<Eigen::Index>(buffer.size());
    ReturnsAdvantages out;
    out.returns.resize(n);
    out.advantages.resize(n);
    double g = 0.0;
    for (Eigen::Index t = n; t-- > 0;) {
        g = buffer[static_cast<std::size_t>(t)].reward + discount * g;
        out.returns[t] = g;
        out.advantages[t] = g - buffer[static_cast<std::size_t>(t)].value;
    }
    if (n >= 2) {
        const double mean = out.advantages.mean();
        const double var = (out.advantages.array() - mean).square().sum() / static_cast<double>(n - 1);
        const double sd = std::sqrt(var);
        out.advantages.array() -= mean;
        if (sd > 1e-12) out.advantages /= sd;
    }
    return out;
}

double clip_objective(double ratio, double advantage, double epsilon) {
    const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
    return std::min(ratio * advantage, clipped * advantage);
}

LossTerms ppo_loss(const PolicyState& policy, const std::vector<Transition>& buffer,
                   const std::vector<std::size_t>& index, const ReturnsAdvantages& targets) {
    if (index.empty()) throw InputError("ppo loss needs at least one record");
    const auto B = static_cast<Eigen::Index>(index.size());
    const Eigen::Index F = policy.actor.input_dim();
    const Eigen::Index d = policy.action_dim;
    const PpoConfig& c = policy.config;

    Matrix S(F, B);
    for (Eigen::Index b = 0; b < B; ++b) S.col(b) = buffer[index[static_cast<std::size_t>(b)]].state;

    net::ForwardCache actor_cache;
    const Matrix out = net::forward(policy.actor, S, &actor_cache);
    net::ForwardCache critic_cache;
    const Matrix V = net::forward(policy.critic, S, &critic_cache);

    LossTerms L;
    Matrix d_out = Matrix::Zero(2 * d, B);
    Matrix d_v(1, B);
    const double inv_b = 1.0 / static_cast<double>(B);
    int clipped = 0;
    for (Eigen::Index b = 0; b < B; ++b) {
        const std::size_t k = index[static_cast<std::size_t>(b)];
        const Transition& tr = buffer[k];
        const double adv = targets.advantages[static_cast<Eigen::Index>(k)];
        const double ret = targets.returns[static_cast<Eigen::Index>(k)];

        const Vector mean = out.col(b).head(d);
        const Vector raw_ls = out.col(b).tail(d);
        const Vector ls = raw_ls.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
        const double logp = gaussian_log_density(tr.z, mean, ls);
        const double ratio = std::exp(logp - tr.logp);
        const double obj = clip_objective(ratio, adv, c.clip);
        const bool active = ratio * adv <= std::clamp(ratio, 1.0 - c.clip, 1.0 + c.clip) * adv;
        if (!active) ++clipped;
        const double d_obj_d_logp = active ? adv * ratio : 0.0;

        double entropy = 0.0;
        for (Eigen::Index j = 0; j < d; ++j) {
            entropy += ls[j] + 0.5 + kHalfLog2Pi;
            const double var = std::exp(2.0 * ls[j]);
            const double diff = tr.z[j] - mean[j];
            d_out(j, b) = -inv_b * d_obj_d_logp * diff / var;
            const bool free = raw_ls[j] >= kLogStdMin && raw_ls[j] <= kLogStdMax;
            if (free) d_out(d + j, b) = -inv_b * (d_obj_d_logp * (diff * diff / var - 1.0) + c.entropy_coef);
        }
        L.actor += -inv_b * obj - c.entropy_coef * inv_b * entropy;
        L.entropy += inv_b * entropy;
        L.mean_ratio += inv_b * ratio;

        const double err = V(0, b) - ret;
        L.critic += 0.5 * inv_b * err * err;
        d_v(0, b) = c.value_coef * inv_b * err;
    }
    L.clip_fraction = static_cast<double>(clipped) * inv_b;
    L.actor_grad = net::backward(policy.actor, actor_cache, d_out).params;
    L.critic_grad = net::backward(policy.critic, critic_cache, d_v).params;
    return L;
}

UpdateDiagnostics ppo_update(PolicyState& policy, Rng& rng) {
    if (policy.buffer.empty()) throw InputError("ppo update needs a non-empty buffer");
    const PpoConfig& c = policy.config;
    if (c.refresh_old) {
        for (auto& tr : policy.buffer) {
            const Head h = policy_head(policy, tr.state);
            tr.logp = gaussian_log_density(tr.z, h.mean, h.log_std);
            tr.value = value(policy, tr.state);
        }
    }
    const ReturnsAdvantages targets = returns_and_advantages(policy.buffer, c.discount);
    std::vector<std::size_t> order(policy.buffer.size());
    UpdateDiagnostics diag;
    for (int epoch = 0; epoch < c.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        UpdateDiagnostics epoch_diag;
        bool aborted = false;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(c.minibatch)) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(c.minibatch));
            const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                               order.begin() + static_cast<std::ptrdiff_t>(end));
            LossTerms L = ppo_loss(policy, policy.buffer, idx, targets);
            if (!std::isfinite(L.actor) || !std::isfinite(L.critic) || !L.actor_grad.all_finite() ||
                !L.critic_grad.all_finite()) {
                aborted = true;
                break;
            }
            net::clip_global_norm(L.actor_grad, c.max_grad_norm);
            net::clip_global_norm(L.critic_grad, c.max_grad_norm);
            net::adam_step(policy.actor_opt, policy.actor, L.actor_grad);
            net::adam_step(policy.critic_opt, policy.critic, L.critic_grad);
            ++epoch_diag.minibatches;
            epoch_diag.actor_loss += L.actor;
            epoch_diag.critic_loss += L.critic;
            epoch_diag.entropy += L.entropy;
            epoch_diag.mean_ratio += L.mean_ratio;
            epoch_diag.clip_fraction += L.clip_fraction;
        }
        if (aborted) {
            ++diag.aborted_epochs;
            continue;
        }
        const double m = static_cast<double>(epoch_diag.minibatches);
        diag.actor_loss = epoch_diag.actor_loss / m;
        diag.critic_loss = epoch_diag.critic_loss / m;
        diag.entropy = epoch_diag.entropy / m;
        diag.mean_ratio = epoch_diag.mean_ratio / m;
        diag.clip_fraction = epoch_diag.clip_fraction / m;
        diag.minibatches += epoch_diag.minibatches;
    }
    return diag;
}

}  // namespace rebmbo::agent
