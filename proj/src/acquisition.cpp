#include "rebmbo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rebmbo::acquisition {

void AcquisitionConfig::validate() const {
    if (!(beta >= 0.0)) throw ParameterError("acquisition beta must be nonnegative");
    if (!(gamma >= 0.0)) throw ParameterError("acquisition gamma must be nonnegative");
    if (n_candidates < 0) throw ParameterError("n_candidates must be >= 1 (or 0 for the default)");
    if (n_refine_steps < 0) throw ParameterError("n_refine_steps must be >= 0");
    if (!(refine_step_size > 0.0)) throw ParameterError("refine_step_size must be positive");
    if (top_k < 1) throw ParameterError("top_k must be >= 1");
}

Eigen::Index AcquisitionConfig::candidates_for(Eigen::Index dim) const {
    if (n_candidates > 0) return n_candidates;
    return std::min(kCandidatesPerDim * dim, kMaxCandidates);
}

double ucb_score(double mu, double sigma, double beta) { return mu + beta * sigma; }

double ebm_ucb_score(double mu, double sigma, double energy_norm, double beta, double gamma) {
    return mu + beta * sigma - gamma * energy_norm;
}

Matrix propose_candidates(const Box& box, Eigen::Index n, Rng& rng) {
    if (n < 1) throw ParameterError("need at least one candidate");
    const Eigen::Index d = box.dim();
    const Eigen::Index n_uniform = n / 2;
    Matrix out(n, d);
    for (Eigen::Index i = 0; i < n_uniform; ++i) {
        Vector u(d);
        for (Eigen::Index j = 0; j < d; ++j) u[j] = uniform01(rng);
        out.row(i) = box.from_unit(u).transpose();
    }
    out.bottomRows(n - n_uniform) = latin_hypercube(box, n - n_uniform, rng);
    return out;
}

namespace {

struct Scorer {
    const gp::GpModel& model;
    const ebm::EnergyModel* energy;
    const AcquisitionConfig& config;
    ebm::EnergyScale scale;

    [[nodiscard]] bool uses_energy() const { return energy != nullptr && config.gamma > 0.0; }

    Choice evaluate(const Vector& x, double raw_energy) const {
        const gp::Prediction p = model.predict(x);
        Choice c;
        c.x = x;
        c.mean = p.mean;
        c.stddev = std::sqrt(std::max(0.0, p.variance));
        c.energy_raw = raw_energy;
        c.energy_norm = energy ? scale(raw_energy) : 0.0;
        c.score = uses_energy() ? ebm_ucb_score(c.mean, c.stddev, c.energy_norm, config.beta, config.gamma)
                                : ucb_score(c.mean, c.stddev, config.beta);
        return c;
    }

    Choice evaluate(const Vector& x) const { return evaluate(x, energy ? ebm::energy(*energy, x) : 0.0); }
};

Choice hill_climb(const Scorer& scorer, Choice start, const Box& box, const AcquisitionConfig& config) {
    Choice best = std::move(start);
    const Vector width = box.width();
    double h = config.refine_step_size;
    for (int step = 0; step < config.n_refine_steps; ++step) {
        bool improved = false;
        for (Eigen::Index j = 0; j < box.dim(); ++j) {
            for (const double dir : {1.0, -1.0}) {
                Vector probe = best.x;
                probe[j] = std::clamp(probe[j] + dir * h * width[j], box.lower()[j], box.upper()[j]);
                if (probe[j] == best.x[j]) continue;
                Choice c = scorer.evaluate(probe);
                if (c.score > best.score) {
                    c.candidate = best.candidate;
                    best = std::move(c);
                    improved = true;
                }
            }
        }
        if (!improved) h *= 0.5;
    }
    return best;
}

}  // namespace

Choice maximize(const gp::GpModel& model, const ebm::EnergyModel* energy, const Box& box,
                const AcquisitionConfig& config, Rng& rng) {
    config.validate();
    if (model.box() != box) throw InputError("acquisition box does not match the surrogate's box");
    const Matrix candidates = propose_candidates(box, config.candidates_for(box.dim()), rng);
    const Eigen::Index n = candidates.rows();

    Vector raw = Vector::Zero(n);
    if (energy) raw = ebm::energy_batch(*energy, candidates);
    Scorer scorer{model, energy, config, energy ? ebm::EnergyScale::from(raw) : ebm::EnergyScale{}};

    std::vector<Choice> scored;
    scored.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        Choice c = scorer.evaluate(candidates.row(i).transpose(), raw[i]);
        c.candidate = i;
        scored.push_back(std::move(c));
    }
    std::vector<std::size_t> order(scored.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Stable: equal scores keep the lower candidate index first.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scored[a].score > scored[b].score; });

    const auto k = std::min<std::size_t>(static_cast<std::size_t>(config.top_k), order.size());
    Choice best = scored[order[0]];
    for (std::size_t r = 0; r < k; ++r) {
        Choice refined = hill_climb(scorer, scored[order[r]], box, config);
        if (refined.score > best.score) best = std::move(refined);
    }
    return best;
}

}  // namespace rebmbo::acquisition
