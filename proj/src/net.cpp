#include "rebmbo/net.hpp"

#include <cmath>

namespace rebmbo::net {

namespace {

Matrix activate(const Matrix& z, Activation a) {
    switch (a) {
        case Activation::identity:
            return z;
        case Activation::relu:
            return z.cwiseMax(0.0);
        case Activation::leaky_relu:
            return z.unaryExpr([](double v) { return v > 0.0 ? v : kLeakySlope * v; });
        case Activation::tanh:
            return z.array().tanh().matrix();
    }
    return z;
}

// Elementwise derivative of the activation evaluated at pre-activation z.
Matrix activation_derivative(const Matrix& z, Activation a) {
    switch (a) {
        case Activation::identity:
            return Matrix::Ones(z.rows(), z.cols());
        case Activation::relu:
            return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
        case Activation::leaky_relu:
            return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : kLeakySlope; });
        case Activation::tanh:
            return (1.0 - z.array().tanh().square()).matrix();
    }
    return Matrix::Ones(z.rows(), z.cols());
}

Layer kaiming_layer(Eigen::Index in, Eigen::Index out, Activation act, Rng& rng) {
    Layer layer;
    const double stddev = std::sqrt(2.0 / static_cast<double>(in));
    layer.weight.resize(out, in);
    for (Eigen::Index i = 0; i < out; ++i) {
        for (Eigen::Index j = 0; j < in; ++j) layer.weight(i, j) = stddev * standard_normal(rng);
    }
    layer.bias = Vector::Zero(out);
    layer.activation = act;
    return layer;
}

}  // namespace

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
}

bool MlpParams::all_finite() const {
    for (const auto& l : layers) {
        if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
    }
    return true;
}

void MlpParams::validate() const {
    if (layers.empty()) throw ParameterError("network has no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        if (l.bias.size() != l.weight.rows()) throw ParameterError("bias length does not match layer width");
        if (i > 0 && l.weight.cols() != layers[i - 1].weight.rows()) {
            throw ParameterError("consecutive layer shapes do not chain");
        }
        if (l.skip_from >= 0) {
            const auto s = static_cast<std::size_t>(l.skip_from);
            if (s > i || layers[s].weight.cols() != l.weight.rows()) {
                throw ParameterError("residual connection joins mismatched widths");
            }
        }
    }
}

MlpParams init_params(const std::vector<Eigen::Index>& layer_sizes, Activation hidden, Activation output,
                      Rng& rng) {
    if (layer_sizes.size() < 2) throw ParameterError("need at least one layer (two sizes)");
    MlpParams p;
    for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i) {
        const bool last = i + 2 == layer_sizes.size();
        p.layers.push_back(kaiming_layer(layer_sizes[i], layer_sizes[i + 1], last ? output : hidden, rng));
    }
    p.validate();
    return p;
}

MlpParams init_params(const std::vector<Eigen::Index>& layer_sizes, Activation hidden, Activation output,
                      std::uint64_t seed) {
    Rng rng(seed);
    return init_params(layer_sizes, hidden, output, rng);
}

MlpParams init_residual(Eigen::Index in, Eigen::Index hidden, Eigen::Index inner, int blocks, Eigen::Index out,
                        Activation activation, std::uint64_t seed) {
    Rng rng(seed);
    MlpParams p;
    p.layers.push_back(kaiming_layer(in, hidden, activation, rng));
    for (int b = 0; b < blocks; ++b) {
        const int block_input = static_cast<int>(p.layers.size());
        p.layers.push_back(kaiming_layer(hidden, inner, activation, rng));
        Layer back = kaiming_layer(inner, hidden, activation, rng);
        back.skip_from = block_input;
        p.layers.push_back(std::move(back));
    }
    p.layers.push_back(kaiming_layer(hidden, out, Activation::identity, rng));
    p.validate();
    return p;
}

Matrix forward(const MlpParams& params, const Matrix& input, ForwardCache* cache) {
    if (params.layers.empty()) throw ParameterError("network has no layers");
    if (input.rows() != params.input_dim()) throw InputError("network input width mismatch");
    std::vector<Matrix> local_inputs;
    std::vector<Matrix>& inputs = cache ? cache->inputs : local_inputs;
    inputs.clear();
    if (cache) cache->pre.clear();
    inputs.reserve(params.layers.size() + 1);
    inputs.push_back(input);
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        const auto& l = params.layers[i];
        Matrix z = l.weight * inputs.back();
        z.colwise() += l.bias;
        Matrix a = activate(z, l.activation);
        if (l.skip_from >= 0) a += inputs[static_cast<std::size_t>(l.skip_from)];
        if (cache) cache->pre.push_back(std::move(z));
        inputs.push_back(std::move(a));
    }
    return inputs.back();
}

Vector forward(const MlpParams& params, const Vector& input) {
    return forward(params, Matrix(input), nullptr).col(0);
}

Gradients Gradients::zeros_like(const MlpParams& params) {
    Gradients g;
    for (const auto& l : params.layers) {
        g.weight.push_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
        g.bias.push_back(Vector::Zero(l.bias.size()));
    }
    return g;
}

void Gradients::add_scaled(const Gradients& other, double s) {
    for (std::size_t i = 0; i < weight.size(); ++i) {
        weight[i] += s * other.weight[i];
        bias[i] += s * other.bias[i];
    }
}

void Gradients::scale(double s) {
    for (std::size_t i = 0; i < weight.size(); ++i) {
        weight[i] *= s;
        bias[i] *= s;
    }
}

double Gradients::squared_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < weight.size(); ++i) s += weight[i].squaredNorm() + bias[i].squaredNorm();
    return s;
}

bool Gradients::all_finite() const {
    for (std::size_t i = 0; i < weight.size(); ++i) {
        if (!weight[i].allFinite() || !bias[i].allFinite()) return false;
    }
    return true;
}

namespace {

void check_cache(const MlpParams& params, const ForwardCache& cache, const Matrix& grad_output) {
    const std::size_t L = params.layers.size();
    if (cache.inputs.size() != L + 1 || cache.pre.size() != L) throw InputError("stale forward cache");
    if (grad_output.rows() != params.output_dim() || grad_output.cols() != cache.inputs.back().cols()) {
        throw InputError("grad_output shape does not match network output");
    }
    for (std::size_t i = 0; i < L; ++i) {
        if (cache.pre[i].rows() != params.layers[i].weight.rows()) throw InputError("stale forward cache");
    }
}

Matrix reverse(const MlpParams& params, const ForwardCache& cache, const Matrix& grad_output, Gradients* out) {
    const std::size_t L = params.layers.size();
    // grad[i] accumulates d/d inputs[i]
    std::vector<Matrix> grad(L + 1);
    grad[L] = grad_output;
    for (std::size_t i = 0; i < L; ++i) grad[i] = Matrix::Zero(cache.inputs[i].rows(), cache.inputs[i].cols());

    for (std::size_t k = L; k-- > 0;) {
        const auto& l = params.layers[k];
        const Matrix dz = grad[k + 1].cwiseProduct(activation_derivative(cache.pre[k], l.activation));
        if (out) {
            out->weight[k] = dz * cache.inputs[k].transpose();
            out->bias[k] = dz.rowwise().sum();
        }
        grad[k].noalias() += l.weight.transpose() * dz;
        if (l.skip_from >= 0) grad[static_cast<std::size_t>(l.skip_from)] += grad[k + 1];
    }
    return std::move(grad[0]);
}

}  // namespace

BackwardResult backward(const MlpParams& params, const ForwardCache& cache, const Matrix& grad_output) {
    check_cache(params, cache, grad_output);
    BackwardResult out;
    out.params = Gradients::zeros_like(params);
    out.input = reverse(params, cache, grad_output, &out.params);
    return out;
}

Matrix backward_input(const MlpParams& params, const ForwardCache& cache, const Matrix& grad_output) {
    check_cache(params, cache, grad_output);
    return reverse(params, cache, grad_output, nullptr);
}

AdamState make_adam(const MlpParams& params, double learning_rate) {
    AdamState s;
    s.learning_rate = learning_rate;
    for (const auto& l : params.layers) {
        s.m_weight.push_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
        s.v_weight.push_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
        s.m_bias.push_back(Vector::Zero(l.bias.size()));
        s.v_bias.push_back(Vector::Zero(l.bias.size()));
    }
    return s;
}

bool adam_step(AdamState& s, MlpParams& params, const Gradients& grads) {
    if (grads.weight.size() != params.layers.size() || s.m_weight.size() != params.layers.size()) {
        throw InputError("adam: gradient structure does not match parameters");
    }
    if (!grads.all_finite()) return false;
    ++s.step;
    const double t = static_cast<double>(s.step);
    const double c1 = 1.0 - std::pow(s.beta1, t);
    const double c2 = 1.0 - std::pow(s.beta2, t);
    auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
        m = s.beta1 * m + (1.0 - s.beta1) * g;
        v = s.beta2 * v + (1.0 - s.beta2) * g.cwiseProduct(g);
        param.array() -= s.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + s.epsilon);
    };
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        update(params.layers[i].weight, s.m_weight[i], s.v_weight[i], grads.weight[i]);
        update(params.layers[i].bias, s.m_bias[i], s.v_bias[i], grads.bias[i]);
    }
    return true;
}

double clip_global_norm(Gradients& grads, double max_norm) {
    if (!(max_norm > 0.0)) throw ParameterError("max_norm must be positive");
    const double norm = std::sqrt(grads.squared_norm());
    if (norm > max_norm) grads.scale(max_norm / norm);
    return norm;
}

}  // namespace rebmbo::net
