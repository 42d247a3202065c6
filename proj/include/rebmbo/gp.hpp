#ifndef REBMBO_GP_HPP
#define REBMBO_GP_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rebmbo/common.hpp"
#include "rebmbo/kernels.hpp"
#include "rebmbo/net.hpp"

namespace rebmbo::gp {

enum class Variant { exact, sparse, deep };

std::string to_string(Variant v);

inline constexpr double kDefaultNoise = 1e-6;
inline constexpr double kInitialJitter = 1e-8;
inline constexpr double kMaxJitter = 1e-4;

struct Prediction {
    double mean = 0.0;
    double variance = 0.0;
};

/// Inducing-point summary for the sparse variant. Stored in the unit box.
/// mu_u / sigma_u are the closed-form optimal q(u) for a Gaussian
/// likelihood; the whitened copies (L^-1 mu_u and L^-1 sigma_u L^-T with
/// L = chol(K_zz)) are what prediction actually uses.
struct SparseState {
    Matrix inducing;
    Eigen::LLT<Matrix> kzz_factor;
    double kzz_jitter = 0.0;
    Vector mu_u;
    Matrix sigma_u;
    Vector whitened_mean;
    Matrix whitened_cov;
};

struct DeepConfig {
    Eigen::Index feature_dim = 8;
    Eigen::Index hidden = 32;
    double beta = 100.0;            // noise precision of the linear head
    double prior_precision = 1.0;   // isotropic prior precision on head weights
    int epochs = 100;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
    // Single linear layer initialised to the identity, feature_dim == d.
    bool identity_features = false;
};

/// Deep-feature surrogate: phi = net(x), Bayesian linear head with
/// precision K = prior_precision * I + beta * Phi^T Phi, mean weights
/// m = beta K^-1 Phi^T y, so mu = m^T phi and sigma^2 = phi^T K^-1 phi + 1/beta.
struct DeepFeatureState {
    net::MlpParams features;
    Vector head_mean;
    Eigen::LLT<Matrix> precision;
    double beta = 100.0;
    double prior_precision = 1.0;
    std::vector<double> loss_history;  // negative log evidence before each epoch's update
};

/// A fitted surrogate. Inputs are rescaled to the unit box and targets
/// standardized internally; predict() speaks original units. Kernel
/// lengthscales are in unit-box coordinates.
class GpModel {
public:
    [[nodiscard]] Variant variant() const { return variant_; }
    [[nodiscard]] const kernels::KernelParams& params() const { return params_; }
    [[nodiscard]] double noise() const { return noise_; }
    [[nodiscard]] double jitter() const { return jitter_; }
    [[nodiscard]] const Box& box() const { return box_; }
    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(inputs_.rows()); }
    [[nodiscard]] double y_mean() const { return y_mean_; }
    [[nodiscard]] double y_scale() const { return y_scale_; }
    [[nodiscard]] const Matrix& unit_inputs() const { return inputs_; }
    [[nodiscard]] const Vector& standardized_targets() const { return targets_; }
    [[nodiscard]] const Eigen::LLT<Matrix>& factor() const { return factor_; }
    [[nodiscard]] const Vector& weights() const { return weights_; }
    [[nodiscard]] const SparseState* sparse() const { return sparse_ ? &*sparse_ : nullptr; }
    [[nodiscard]] const DeepFeatureState* deep() const { return deep_ ? &*deep_ : nullptr; }

    /// Posterior in original units, any variant.
    [[nodiscard]] Prediction predict(const Vector& x) const;
    /// Posterior on the standardized target scale.
    [[nodiscard]] Prediction predict_standardized(const Vector& x) const;
    /// Prior variance k(x, x) in original units.
    [[nodiscard]] double prior_variance() const;
    /// Exact variant only: log evidence of the standardized targets.
    [[nodiscard]] double log_marginal_likelihood() const;

    [[nodiscard]] double standardize(double y) const { return (y - y_mean_) / y_scale_; }

private:
    friend GpModel make_prior(const Box&, const kernels::KernelParams&, double);
    friend GpModel fit_exact(const Dataset&, const kernels::KernelParams&, double);
    friend GpModel fit_sparse_with_inducing(const Dataset&, const Matrix&, const kernels::KernelParams&, double);
    friend GpModel fit_deep(const Dataset&, const DeepConfig&);
    friend double posterior_cov(const GpModel&, const Vector&, const Vector&);

    void load_data(const Dataset& data);

    Variant variant_ = Variant::exact;
    kernels::KernelParams params_;
    double noise_ = kDefaultNoise;
    double jitter_ = 0.0;
    Box box_;
    Matrix inputs_;
    Vector targets_;
    double y_mean_ = 0.0;
    double y_scale_ = 1.0;
    Eigen::LLT<Matrix> factor_;
    Vector weights_;
    std::optional<SparseState> sparse_;
    std::optional<DeepFeatureState> deep_;
};

/// Unconditioned model (n = 0): mean 0, variance k(x, x).
GpModel make_prior(const Box& box, const kernels::KernelParams& params, double noise = kDefaultNoise);

/// Cholesky of K + noise I, escalating an extra diagonal jitter from 1e-8
/// by factors of 10 up to 1e-4 if the factorization fails. Throws
/// NumericalError with conditioning diagnostics if nothing works.
GpModel fit_exact(const Dataset& data, const kernels::KernelParams& params, double noise = kDefaultNoise);

Prediction predict(const GpModel& model, const Vector& x);

double log_marginal_likelihood(const Dataset& data, const kernels::KernelParams& params,
                               double noise = kDefaultNoise);

struct HyperOptResult {
    kernels::KernelParams params;
    double log_likelihood = 0.0;
    double initial_log_likelihood = 0.0;
    int evaluations = 0;
    bool warning = false;  // every start failed to fit; params == init
};

/// Multi-start Nelder-Mead ascent of the log marginal likelihood over
/// log-parameters. `budget` caps the total number of likelihood
/// evaluations across all starts. Mixture weights that start at exactly
/// zero stay at zero. The returned likelihood is never below init's.
HyperOptResult optimize_hyperparams(const Dataset& data, const kernels::KernelParams& init, double noise,
                                    int budget, int starts = 4, std::uint64_t seed = 0);

/// Deterministic k-means++ / Lloyd centers of the rows of X.
Matrix kmeans_centers(const Matrix& X, Eigen::Index m, std::uint64_t seed, int iterations = 25);

/// Sparse variant with m inducing points placed at k-means centers of the
/// (unit-box) inputs; m == n uses the inputs themselves.
GpModel fit_sparse(const Dataset& data, Eigen::Index m, const kernels::KernelParams& params,
                   double noise = kDefaultNoise, std::uint64_t seed = 0);
/// Sparse variant with caller-chosen inducing points, given in original units.
GpModel fit_sparse_with_inducing(const Dataset& data, const Matrix& inducing, const kernels::KernelParams& params,
                                 double noise = kDefaultNoise);
Prediction predict_sparse(const GpModel& model, const Vector& x);

/// Trains the feature network by full-batch Adam on the negative log
/// evidence of the Bayesian linear head, then solves the head.
GpModel fit_deep(const Dataset& data, const DeepConfig& config);

/// P(f(x) <= z). A zero-variance posterior gives a step at the mean.
double posterior_cdf(const GpModel& model, const Vector& x, double z);

/// Exact variant only; throws UnsupportedError otherwise.
double posterior_cov(const GpModel& model, const Vector& x, const Vector& xp);

struct DuelResult {
    double probability = 0.5;
    bool degenerate = false;
};

/// P(f(x) > f(xp)) under the joint posterior. Exact variant only.
DuelResult prob_duel(const GpModel& model, const Vector& x, const Vector& xp);

}  // namespace rebmbo::gp

#endif  // REBMBO_GP_HPP
