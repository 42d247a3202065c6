#ifndef REBMBO_EBM_HPP
#define REBMBO_EBM_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rebmbo/common.hpp"
#include "rebmbo/net.hpp"

namespace rebmbo::ebm {

struct LangevinConfig {
    int steps = 20;
    double step_size = 0.01;
    double temperature = 0.1;

    void validate() const;
};

struct EbmConfig {
    Eigen::Index hidden = 128;
    Eigen::Index inner = 128;
    int blocks = 1;
    double learning_rate = 1e-4;
    int epochs = 30;
    Eigen::Index batch_size = 64;
    LangevinConfig langevin;

    void validate() const;
};

/// E_theta(x) = net(to_symmetric(x)). The network and the Langevin chains
/// both work in [-1, 1]^d coordinates.
struct EnergyModel {
    net::MlpParams net;
    net::AdamState optimizer;
    Box box;
    std::int64_t train_steps = 0;
    LangevinConfig langevin;
};

EnergyModel make_energy_model(const Box& box, const EbmConfig& config, std::uint64_t seed);

double energy(const EnergyModel& model, const Vector& x);
/// Energies of the rows of X (original units).
Vector energy_batch(const EnergyModel& model, const Matrix& X);
/// d E / d x in original units.
Vector energy_input_grad(const EnergyModel& model, const Vector& x);

/// Maps the columns of U (d x n) to the gradient of the energy at each column.
using BatchGradient = std::function<Matrix(const Matrix&)>;

struct ChainBounds {
    double lower = -1.0;
    double upper = 1.0;
};

struct ChainResult {
    Matrix samples;  // d x n
    int reinitialized = 0;
};

/// u <- u - eta grad E(u) + sqrt(2 eta tau) eps, `steps` times, on every
/// column of `init`. With bounds, samples are clamped after each step and
/// any column whose norm exceeds 1e6 is redrawn uniformly in the bounds.
/// Without bounds, divergent columns are redrawn uniformly in [-1, 1].
ChainResult langevin_chain(const BatchGradient& grad, Matrix init, const LangevinConfig& config, Rng& rng,
                           std::optional<ChainBounds> bounds = ChainBounds{});

struct LangevinSamples {
    Matrix samples;  // n x d, original units
    int reinitialized = 0;
};

/// Fresh uniform initialization in the box, then a clamped chain.
LangevinSamples langevin_sample(const EnergyModel& model, Eigen::Index n_samples, Rng& rng);

struct TrainDiagnostics {
    double mean_positive = 0.0;
    double mean_negative = 0.0;
    int reinitialized = 0;
    bool skipped = false;  // non-finite gradient, parameters untouched
};

/// Mean over the batch of grad_theta E on `positives` minus the same on
/// `negatives` (both n x d, original units).
net::Gradients contrastive_gradient(const EnergyModel& model, const Matrix& positives, const Matrix& negatives,
                                    double* mean_pos = nullptr, double* mean_neg = nullptr);

/// One maximum-likelihood step with b fresh Langevin negatives.
TrainDiagnostics train_step(EnergyModel& model, const Matrix& batch, Rng& rng);
/// As train_step, with caller-provided negatives.
TrainDiagnostics train_step_with_negatives(EnergyModel& model, const Matrix& batch, const Matrix& negatives);

/// Shuffled mini-batch passes over `inputs` (n x d). Returns one diagnostic
/// per train step.
std::vector<TrainDiagnostics> train_epochs(EnergyModel& model, const Matrix& inputs, int epochs,
                                           Eigen::Index batch_size, Rng& rng);

/// Min-max rescale to [0, 1]; a constant batch maps to 0.5.
std::vector<double> normalize_energies(const std::vector<double>& values);
Vector normalize_energies(const Vector& values);

/// Applies min-max constants taken from a reference batch.
struct EnergyScale {
    double min = 0.0;
    double max = 0.0;

    static EnergyScale from(const Vector& reference);
    [[nodiscard]] double operator()(double e) const;
};

}  // namespace rebmbo::ebm

#endif  // REBMBO_EBM_HPP
