#ifndef REBMBO_NET_HPP
#define REBMBO_NET_HPP

#include <cstdint>
#include <vector>

#include "rebmbo/common.hpp"

// Small dense networks with hand-written reverse mode, shared by the
// energy model, the deep-feature GP and the PPO actor/critic.
namespace rebmbo::net {

enum class Activation { identity, relu, leaky_relu, tanh };

inline constexpr double kLeakySlope = 0.2;

struct Layer {
    Matrix weight;  // out x in
    Vector bias;    // out
    Activation activation = Activation::identity;
    // When >= 0, the input of layer `skip_from` is added to this layer's
    // activated output (a residual connection). Shapes must agree.
    int skip_from = -1;
};

struct MlpParams {
    std::vector<Layer> layers;

    [[nodiscard]] Eigen::Index input_dim() const { return layers.front().weight.cols(); }
    [[nodiscard]] Eigen::Index output_dim() const { return layers.back().weight.rows(); }
    [[nodiscard]] std::size_t parameter_count() const;
    [[nodiscard]] bool all_finite() const;
    void validate() const;
};

/// Plain MLP: layer_sizes = {in, h1, ..., out}. Hidden layers use
/// `hidden`, the last layer uses `output`. Kaiming-normal weights
/// (std sqrt(2 / fan_in)), zero biases.
MlpParams init_params(const std::vector<Eigen::Index>& layer_sizes, Activation hidden, Activation output,
                      std::uint64_t seed);
MlpParams init_params(const std::vector<Eigen::Index>& layer_sizes, Activation hidden, Activation output,
                      Rng& rng);

/// in -> hidden, then `blocks` residual blocks h + act(W2 act(W1 h)) with
/// inner width `inner`, then a linear read-out to `out`.
MlpParams init_residual(Eigen::Index in, Eigen::Index hidden, Eigen::Index inner, int blocks, Eigen::Index out,
                        Activation activation, std::uint64_t seed);

struct ForwardCache {
    std::vector<Matrix> inputs;  // inputs[i] feeds layer i; inputs.back() is the network output
    std::vector<Matrix> pre;     // pre-activations per layer
};

/// Batched forward pass. Columns of `input` are samples.
Matrix forward(const MlpParams& params, const Matrix& input, ForwardCache* cache = nullptr);
Vector forward(const MlpParams& params, const Vector& input);

struct Gradients {
    std::vector<Matrix> weight;
    std::vector<Vector> bias;

    static Gradients zeros_like(const MlpParams& params);
    void add_scaled(const Gradients& other, double scale);
    void scale(double s);
    [[nodiscard]] double squared_norm() const;
    [[nodiscard]] bool all_finite() const;
};

struct BackwardResult {
    Gradients params;  // summed over the batch
    Matrix input;      // gradient wrt each input column
};

/// Reverse pass for sum_b <output_b, grad_output_b>.
BackwardResult backward(const MlpParams& params, const ForwardCache& cache, const Matrix& grad_output);
/// Same reverse pass, input gradient only (skips the weight products).
Matrix backward_input(const MlpParams& params, const ForwardCache& cache, const Matrix& grad_output);

struct AdamState {
    std::vector<Matrix> m_weight, v_weight;
    std::vector<Vector> m_bias, v_bias;
    std::int64_t step = 0;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

AdamState make_adam(const MlpParams& params, double learning_rate);

/// Bias-corrected Adam descent step. Returns false (and leaves params and
/// moments untouched) when any gradient entry is non-finite.
bool adam_step(AdamState& state, MlpParams& params, const Gradients& grads);

/// Rescales grads in place so their global L2 norm is at most max_norm.
/// Returns the norm before clipping.
double clip_global_norm(Gradients& grads, double max_norm);

}  // namespace rebmbo::net

#endif  // REBMBO_NET_HPP
