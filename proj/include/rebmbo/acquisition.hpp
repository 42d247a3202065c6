#ifndef REBMBO_ACQUISITION_HPP
#define REBMBO_ACQUISITION_HPP

#include "rebmbo/common.hpp"
#include "rebmbo/ebm.hpp"
#include "rebmbo/gp.hpp"

namespace rebmbo::acquisition {

struct AcquisitionConfig {
    double beta = 2.0;
    double gamma = 0.1;
    Eigen::Index n_candidates = 0;  // 0: 256 * d, capped at 4096
    int n_refine_steps = 20;
    double refine_step_size = 0.05;  // initial step as a fraction of each box side
    int top_k = 4;

    void validate() const;
    [[nodiscard]] Eigen::Index candidates_for(Eigen::Index dim) const;
};

inline constexpr Eigen::Index kCandidatesPerDim = 256;
inline constexpr Eigen::Index kMaxCandidates = 4096;

double ucb_score(double mu, double sigma, double beta);
double ebm_ucb_score(double mu, double sigma, double energy_norm, double beta, double gamma);

/// First n/2 rows uniform, the rest a Latin hypercube.
Matrix propose_candidates(const Box& box, Eigen::Index n, Rng& rng);

struct Choice {
    Vector x;
    double score = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    double energy_raw = 0.0;   // 0 without an energy model
    double energy_norm = 0.0;  // under the candidate batch's min-max constants
    Eigen::Index candidate = 0;  // index of the seed candidate that led here
};

/// Scores a candidate batch, hill-climbs from the top_k and returns the
/// best. Passing a null energy model, or gamma = 0, gives plain UCB; the
/// random stream is consumed identically either way.
Choice maximize(const gp::GpModel& model, const ebm::EnergyModel* energy, const Box& box,
                const AcquisitionConfig& config, Rng& rng);

}  // namespace rebmbo::acquisition

#endif  // REBMBO_ACQUISITION_HPP
