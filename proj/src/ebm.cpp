#include "rebmbo/ebm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rebmbo::ebm {

namespace {

constexpr double kDivergenceNorm = 1e6;

// Columns are samples in [-1, 1]^d.
Matrix to_symmetric_cols(const Box& box, const Matrix& X) {
    Matrix U(X.cols(), X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const Vector x = X.row(i).transpose();
        if (!x.allFinite()) throw InputError("energy input must be finite");
        U.col(i) = box.to_symmetric(x);
    }
    return U;
}

Matrix from_symmetric_rows(const Box& box, const Matrix& U) {
    Matrix X(U.cols(), U.rows());
    for (Eigen::Index i = 0; i < U.cols(); ++i) X.row(i) = box.from_symmetric(U.col(i)).transpose();
    return X;
}

Matrix net_input_grad(const net::MlpParams& params, const Matrix& U) {
    net::ForwardCache cache;
    net::forward(params, U, &cache);
    return net::backward_input(params, cache, Matrix::Ones(1, U.cols()));
}

void uniform_fill(Eigen::Ref<Vector> col, double lo, double hi, Rng& rng) {
    for (Eigen::Index i = 0; i < col.size(); ++i) col[i] = lo + (hi - lo) * uniform01(rng);
}

}  // namespace

void LangevinConfig::validate() const {
    if (steps < 1) throw ParameterError("langevin steps must be >= 1");
    if (!(step_size > 0.0)) throw ParameterError("langevin step size must be positive");
    if (!(temperature >= 0.0)) throw ParameterError("langevin temperature must be nonnegative");
}

void EbmConfig::validate() const {
    if (hidden < 1 || inner < 1 || blocks < 0) throw ParameterError("invalid energy network shape");
    if (!(learning_rate > 0.0)) throw ParameterError("energy learning rate must be positive");
    if (epochs < 0) throw ParameterError("energy epochs must be >= 0");
    if (batch_size < 1) throw ParameterError("energy batch size must be >= 1");
    langevin.validate();
}

EnergyModel make_energy_model(const Box& box, const EbmConfig& config, std::uint64_t seed) {
    config.validate();
    EnergyModel m;
    m.net = net::init_residual(box.dim(), config.hidden, config.inner, config.blocks, 1, net::Activation::leaky_relu,
                               seed);
    m.optimizer = net::make_adam(m.net, config.learning_rate);
    m.box = box;
    m.langevin = config.langevin;
    return m;
}

double energy(const EnergyModel& model, const Vector& x) {
    if (x.size() != model.box.dim()) throw InputError("energy input has wrong dimension");
    if (!x.allFinite()) throw InputError("energy input must be finite");
    return net::forward(model.net, model.box.to_symmetric(x))[0];
}

Vector energy_batch(const EnergyModel& model, const Matrix& X) {
    if (X.cols() != model.box.dim()) throw InputError("energy input has wrong dimension");
    if (X.rows() == 0) return Vector();
    return net::forward(model.net, to_symmetric_cols(model.box, X)).row(0).transpose();
}

Vector energy_input_grad(const EnergyModel& model, const Vector& x) {
    if (x.size() != model.box.dim()) throw InputError("energy input has wrong dimension");
    if (!x.allFinite()) throw InputError("energy input must be finite");
    const Vector g = net_input_grad(model.net, Matrix(model.box.to_symmetric(x))).col(0);
    // u = 2 (x - lower) / width - 1
    return g.cwiseProduct((2.0 * Vector::Ones(x.size())).cwiseQuotient(model.box.width()));
}

ChainResult langevin_chain(const BatchGradient& grad, Matrix init, const LangevinConfig& config, Rng& rng,
                           std::optional<ChainBounds> bounds) {
    config.validate();
    ChainResult r;
    r.samples = std::move(init);
    Matrix& U = r.samples;
    const double noise = std::sqrt(2.0 * config.step_size * config.temperature);
    const ChainBounds redraw = bounds.value_or(ChainBounds{});
    for (int k = 0; k < config.steps; ++k) {
        U -= config.step_size * grad(U);
        if (noise > 0.0) {
            for (Eigen::Index j = 0; j < U.cols(); ++j) {
                for (Eigen::Index i = 0; i < U.rows(); ++i) U(i, j) += noise * standard_normal(rng);
            }
        }
        for (Eigen::Index j = 0; j < U.cols(); ++j) {
            auto col = U.col(j);
            if (!col.allFinite() || col.norm() > kDivergenceNorm) {
                uniform_fill(col, redraw.lower, redraw.upper, rng);
                ++r.reinitialized;
            }
        }
        if (bounds) U = U.cwiseMax(bounds->lower).cwiseMin(bounds->upper);
    }
    return r;
}

LangevinSamples langevin_sample(const EnergyModel& model, Eigen::Index n_samples, Rng& rng) {
    if (n_samples < 1) throw ParameterError("need at least one Langevin sample");
    const Eigen::Index d = model.box.dim();
    Matrix U(d, n_samples);
    for (Eigen::Index j = 0; j < n_samples; ++j) uniform_fill(U.col(j), -1.0, 1.0, rng);
    const auto grad = [&model](const Matrix& V) { return net_input_grad(model.net, V); };
    ChainResult chain = langevin_chain(grad, std::move(U), model.langevin, rng, ChainBounds{});
    LangevinSamples s;
    s.samples = from_symmetric_rows(model.box, chain.samples);
    s.reinitialized = chain.reinitialized;
    return s;
}

net::Gradients contrastive_gradient(const EnergyModel& model, const Matrix& positives, const Matrix& negatives,
                                    double* mean_pos, double* mean_neg) {
    if (positives.rows() < 1 || negatives.rows() < 1) throw InputError("contrastive gradient needs non-empty batches");
    const auto phase = [&model](const Matrix& X, double weight, double* mean) {
        net::ForwardCache cache;
        const Matrix e = net::forward(model.net, to_symmetric_cols(model.box, X), &cache);
        if (mean) *mean = e.mean();
        const Matrix seed = Matrix::Constant(1, X.rows(), weight / static_cast<double>(X.rows()));
        return net::backward(model.net, cache, seed).params;
    };
    net::Gradients g = phase(positives, 1.0, mean_pos);
    g.add_scaled(phase(negatives, 1.0, mean_neg), -1.0);
    return g;
}

TrainDiagnostics train_step_with_negatives(EnergyModel& model, const Matrix& batch, const Matrix& negatives) {
    TrainDiagnostics diag;
    const net::Gradients g = contrastive_gradient(model, batch, negatives, &diag.mean_positive, &diag.mean_negative);
    // Descending this direction lowers energy on data and raises it on samples.
    diag.skipped = !net::adam_step(model.optimizer, model.net, g);
    if (!diag.skipped) ++model.train_steps;
    return diag;
}

TrainDiagnostics train_step(EnergyModel& model, const Matrix& batch, Rng& rng) {
    if (batch.rows() < 1) throw InputError("energy train step needs a non-empty batch");
    const LangevinSamples neg = langevin_sample(model, batch.rows(), rng);
    TrainDiagnostics diag = train_step_with_negatives(model, batch, neg.samples);
    diag.reinitialized = neg.reinitialized;
    return diag;
}

std::vector<TrainDiagnostics> train_epochs(EnergyModel& model, const Matrix& inputs, int epochs,
                                           Eigen::Index batch_size, Rng& rng) {
    if (epochs < 0) throw ParameterError("epochs must be >= 0");
    if (batch_size < 1) throw ParameterError("batch size must be >= 1");
    std::vector<TrainDiagnostics> out;
    if (epochs == 0) return out;
    const Eigen::Index n = inputs.rows();
    if (n < 1) throw InputError("energy training needs a non-empty dataset");
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (int e = 0; e < epochs; ++e) {
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::shuffle(order.begin(), order.end(), rng);
        for (Eigen::Index start = 0; start < n; start += batch_size) {
            const Eigen::Index b = std::min(batch_size, n - start);
            Matrix batch(b, inputs.cols());
            for (Eigen::Index i = 0; i < b; ++i) batch.row(i) = inputs.row(order[static_cast<std::size_t>(start + i)]);
            out.push_back(train_step(model, batch, rng));
        }
    }
    return out;
}

std::vector<double> normalize_energies(const std::vector<double>& values) {
    const Vector v = normalize_energies(Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
    return {v.data(), v.data() + v.size()};
}

Vector normalize_energies(const Vector& values) {
    if (values.size() == 0) throw InputError("cannot normalize an empty energy batch");
    const EnergyScale s = EnergyScale::from(values);
    return values.unaryExpr([&s](double e) { return s(e); });
}

EnergyScale EnergyScale::from(const Vector& reference) {
    if (reference.size() == 0) throw InputError("energy scale needs a non-empty reference batch");
    return {reference.minCoeff(), reference.maxCoeff()};
}

double EnergyScale::operator()(double e) const {
    const double range = max - min;
    if (!(range > 0.0)) return 0.5;
    return (e - min) / range;
}

}  // namespace rebmbo::ebm
