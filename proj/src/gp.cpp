#include "rebmbo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

namespace rebmbo::gp {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

bool factor_ok(const Eigen::LLT<Matrix>& llt) {
    if (llt.info() != Eigen::Success) return false;
    const Matrix& L = llt.matrixLLT();
    for (Eigen::Index i = 0; i < L.rows(); ++i) {
        if (!(L(i, i) > 0.0) || !std::isfinite(L(i, i))) return false;
    }
    return true;
}

std::string conditioning_report(const Matrix& K) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(K, Eigen::EigenvaluesOnly);
    std::ostringstream os;
    if (eig.info() == Eigen::Success && eig.eigenvalues().size() > 0) {
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        os << "min eigenvalue " << lo << ", max eigenvalue " << hi;
        if (lo > 0.0) os << ", condition number " << hi / lo;
    } else {
        os << "eigen decomposition failed";
    }
    return os.str();
}

// Returns the jitter that had to be added on top of `noise`.
double factorize_with_jitter(const Matrix& K, double noise, Eigen::LLT<Matrix>& llt) {
    const Eigen::Index n = K.rows();
    Matrix A = K;
    A.diagonal().array() += noise;
    llt.compute(A);
    if (factor_ok(llt)) return 0.0;
    for (double jitter = kInitialJitter; jitter <= kMaxJitter * (1.0 + 1e-12); jitter *= 10.0) {
        A = K;
        A.diagonal().array() += noise + jitter;
        llt.compute(A);
        if (factor_ok(llt)) return jitter;
    }
    Matrix B = K;
    B.diagonal().array() += noise;
    throw NumericalError("covariance factorization failed after jitter escalation to " + std::to_string(kMaxJitter) +
                         " (n = " + std::to_string(n) + "; " + conditioning_report(B) + ")");
}

// Minimal Nelder-Mead minimizer with an evaluation cap.
struct NelderMeadResult {
    Vector x;
    double value = std::numeric_limits<double>::infinity();
    int evaluations = 0;
};

NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0, double step,
                             int max_evals) {
    const Eigen::Index n = x0.size();
    NelderMeadResult best;
    best.x = x0;
    if (max_evals <= 0) return best;

    std::vector<Vector> simplex;
    std::vector<double> values;
    auto eval = [&](const Vector& x) {
        const double v = f(x);
        ++best.evaluations;
        const double safe = std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
        if (safe < best.value) {
            best.value = safe;
            best.x = x;
        }
        return safe;
    };
    auto exhausted = [&] { return best.evaluations >= max_evals; };

    simplex.push_back(x0);
    values.push_back(eval(x0));
    for (Eigen::Index i = 0; i < n && !exhausted(); ++i) {
        Vector x = x0;
        x[i] += step;
        simplex.push_back(x);
        values.push_back(eval(x));
    }
    if (static_cast<Eigen::Index>(simplex.size()) < n + 1) return best;

    std::vector<std::size_t> order(simplex.size());
    while (!exhausted()) {
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t lo = order.front();
        const std::size_t hi = order.back();
        const std::size_t second_hi = order[order.size() - 2];
        if (std::abs(values[hi] - values[lo]) < 1e-10 * (1.0 + std::abs(values[lo]))) break;

        Vector centroid = Vector::Zero(n);
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (i != hi) centroid += simplex[i];
        }
        centroid /= static_cast<double>(n);

        const Vector reflected = centroid + (centroid - simplex[hi]);
        const double fr = eval(reflected);
        if (fr < values[lo]) {
            if (exhausted()) break;
            const Vector expanded = centroid + 2.0 * (centroid - simplex[hi]);
            const double fe = eval(expanded);
            if (fe < fr) {
                simplex[hi] = expanded;
                values[hi] = fe;
            } else {
                simplex[hi] = reflected;
                values[hi] = fr;
            }
            continue;
        }
        if (fr < values[second_hi]) {
            simplex[hi] = reflected;
            values[hi] = fr;
            continue;
        }
        if (exhausted()) break;
        const bool outside = fr < values[hi];
        const Vector contracted =
            outside ? Vector(centroid + 0.5 * (reflected - centroid)) : Vector(centroid + 0.5 * (simplex[hi] - centroid));
        const double fc = eval(contracted);
        if (fc < std::min(fr, values[hi])) {
            simplex[hi] = contracted;
            values[hi] = fc;
            continue;
        }
        for (std::size_t i = 0; i < simplex.size() && !exhausted(); ++i) {
            if (i == lo) continue;
            simplex[i] = simplex[lo] + 0.5 * (simplex[i] - simplex[lo]);
            values[i] = eval(simplex[i]);
        }
    }
    return best;
}

// Log-space encoding of the kernel parameters with box limits.
class LogParamCodec {
public:
    explicit LogParamCodec(const kernels::KernelParams& init) : init_(init) {
        use_rbf_ = init.w_rbf > 0.0;
        use_matern_ = init.w_matern > 0.0;
    }

    [[nodiscard]] Vector encode(const kernels::KernelParams& p) const {
        std::vector<double> v;
        v.push_back(std::log(p.amplitude));
        if (use_rbf_) {
            for (Eigen::Index i = 0; i < p.rbf_lengthscales.size(); ++i) v.push_back(std::log(p.rbf_lengthscales[i]));
            v.push_back(std::log(p.w_rbf));
        }
        if (use_matern_) {
            v.push_back(std::log(p.matern_lengthscale));
            v.push_back(std::log(p.w_matern));
        }
        return Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    }

    [[nodiscard]] kernels::KernelParams decode(const Vector& v) const {
        kernels::KernelParams p = init_;
        Eigen::Index k = 0;
        p.amplitude = bounded(v[k++], kAmplitude);
        if (use_rbf_) {
            for (Eigen::Index i = 0; i < p.rbf_lengthscales.size(); ++i) p.rbf_lengthscales[i] = bounded(v[k++], kLength);
            p.w_rbf = bounded(v[k++], kWeight);
        }
        if (use_matern_) {
            p.matern_lengthscale = bounded(v[k++], kLength);
            p.w_matern = bounded(v[k++], kWeight);
        }
        return p;
    }

private:
    struct Range {
        double lo, hi;
    };
    static constexpr Range kAmplitude{1e-3, 1e3};
    static constexpr Range kLength{1e-3, 1e2};
    static constexpr Range kWeight{1e-4, 1e2};

    static double bounded(double log_value, Range r) { return std::clamp(std::exp(log_value), r.lo, r.hi); }

    kernels::KernelParams init_;
    bool use_rbf_ = true;
    bool use_matern_ = true;
};

}  // namespace

std::string to_string(Variant v) {
    switch (v) {
        case Variant::exact:
            return "exact";
        case Variant::sparse:
            return "sparse";
        case Variant::deep:
            return "deep";
    }
    return "unknown";
}

void GpModel::load_data(const Dataset& data) {
    box_ = data.box();
    const auto n = static_cast<Eigen::Index>(data.size());
    inputs_.resize(n, box_.dim());
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!data.x(static_cast<std::size_t>(i)).allFinite()) throw InputError("non-finite training input");
        inputs_.row(i) = box_.to_unit(data.x(static_cast<std::size_t>(i))).transpose();
    }
    const Vector y = data.targets();
    if (!y.allFinite()) throw InputError("non-finite training target");
    y_mean_ = n > 0 ? y.mean() : 0.0;
    y_scale_ = 1.0;
    if (n >= 2) {
        const double var = (y.array() - y_mean_).square().sum() / static_cast<double>(n - 1);
        if (std::sqrt(var) > 1e-12) y_scale_ = std::sqrt(var);
    }
    targets_ = n > 0 ? Vector((y.array() - y_mean_) / y_scale_) : Vector();
}

double GpModel::prior_variance() const {
    if (variant_ == Variant::deep) {
        throw UnsupportedError("deep-feature model has no stationary prior variance");
    }
    return y_scale_ * y_scale_ * params_.prior_variance();
}

Prediction GpModel::predict_standardized(const Vector& x) const {
    if (x.size() != box_.dim()) throw InputError("prediction point has wrong dimension");
    const Vector u = box_.to_unit(x);
    Prediction p;
    switch (variant_) {
        case Variant::exact: {
            const double prior = params_.prior_variance();
            if (inputs_.rows() == 0) {
                p.mean = 0.0;
                p.variance = prior;
                return p;
            }
            const Vector k = kernels::cross(inputs_, u, params_);
            p.mean = k.dot(weights_);
            const Vector v = factor_.matrixL().solve(k);
            p.variance = std::max(0.0, prior - v.squaredNorm());
            return p;
        }
        case Variant::sparse: {
            const auto& s = *sparse_;
            const Vector k = kernels::cross(s.inducing, u, params_);
            const Vector c = s.kzz_factor.matrixL().solve(k);
            p.mean = c.dot(s.whitened_mean);
            p.variance = std::max(0.0, params_.prior_variance() - c.squaredNorm() + c.dot(s.whitened_cov * c));
            return p;
        }
        case Variant::deep: {
            const auto& s = *deep_;
            const Vector phi = net::forward(s.features, u);
            p.mean = s.head_mean.dot(phi);
            p.variance = phi.dot(s.precision.solve(phi)) + 1.0 / s.beta;
            return p;
        }
    }
    return p;
}

Prediction GpModel::predict(const Vector& x) const {
    Prediction p = predict_standardized(x);
    p.mean = y_mean_ + y_scale_ * p.mean;
    p.variance *= y_scale_ * y_scale_;
    return p;
}

double GpModel::log_marginal_likelihood() const {
    if (variant_ != Variant::exact) throw UnsupportedError("log marginal likelihood is defined for the exact variant");
    const auto n = static_cast<double>(inputs_.rows());
    if (inputs_.rows() == 0) return 0.0;
    const double log_det_half = factor_.matrixLLT().diagonal().array().log().sum();
    return -0.5 * targets_.dot(weights_) - log_det_half - 0.5 * n * kLog2Pi;
}

GpModel make_prior(const Box& box, const kernels::KernelParams& params, double noise) {
    params.validate();
    if (!(noise > 0.0)) throw ParameterError("noise variance must be positive");
    if (params.rbf_lengthscales.size() != box.dim()) throw InputError("kernel dimension does not match box");
    GpModel m;
    m.variant_ = Variant::exact;
    m.params_ = params;
    m.noise_ = noise;
    m.box_ = box;
    m.inputs_.resize(0, box.dim());
    return m;
}

GpModel fit_exact(const Dataset& data, const kernels::KernelParams& params, double noise) {
    GpModel m = make_prior(data.box(), params, noise);
    m.load_data(data);
    if (data.empty()) return m;
    const Matrix K = kernels::gram(m.inputs_, params);
    m.jitter_ = factorize_with_jitter(K, noise, m.factor_);
    m.weights_ = m.factor_.solve(m.targets_);
    return m;
}

Prediction predict(const GpModel& model, const Vector& x) { return model.predict(x); }

double log_marginal_likelihood(const Dataset& data, const kernels::KernelParams& params, double noise) {
    return fit_exact(data, params, noise).log_marginal_likelihood();
}

HyperOptResult optimize_hyperparams(const Dataset& data, const kernels::KernelParams& init, double noise, int budget,
                                    int starts, std::uint64_t seed) {
    if (budget < 1) throw ParameterError("hyperparameter budget must be >= 1");
    init.validate();
    HyperOptResult result;
    result.params = init;

    const LogParamCodec codec(init);
    auto objective = [&](const Vector& v) {
        try {
            return -log_marginal_likelihood(data, codec.decode(v), noise);
        } catch (const NumericalError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    const Vector x0 = codec.encode(init);
    const double f0 = objective(x0);
    result.evaluations = 1;
    result.initial_log_likelihood = -f0;
    double best_f = f0;
    Vector best_x = x0;

    starts = std::max(1, starts);
    int remaining = budget - 1;
    Rng rng(seed);
    for (int s = 0; s < starts && remaining > 0; ++s) {
        const int share = remaining / (starts - s);
        Vector start = x0;
        if (s > 0) start += standard_normal_vector(x0.size(), rng);
        const NelderMeadResult r = nelder_mead(objective, start, 0.5, share);
        remaining -= r.evaluations;
        result.evaluations += r.evaluations;
        if (r.value < best_f) {
            best_f = r.value;
            best_x = r.x;
        }
    }

    if (!std::isfinite(best_f)) {
        result.warning = true;
        result.log_likelihood = -f0;
        return result;
    }
    // Accept only strict improvements so the result never falls below init.
    if (best_f < f0) result.params = codec.decode(best_x);
    result.log_likelihood = -std::min(best_f, f0);
    return result;
}

Matrix kmeans_centers(const Matrix& X, Eigen::Index m, std::uint64_t seed, int iterations) {
    const Eigen::Index n = X.rows();
    if (m < 1 || m > n) throw ParameterError("k-means needs 1 <= m <= n");
    Rng rng(seed);
    Matrix centers(m, X.cols());
    std::vector<double> dist(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());

    // k-means++ seeding
    std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
    centers.row(0) = X.row(first(rng));
    for (Eigen::Index c = 1; c < m; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = (X.row(i) - centers.row(c - 1)).squaredNorm();
            dist[static_cast<std::size_t>(i)] = std::min(dist[static_cast<std::size_t>(i)], d);
            total += dist[static_cast<std::size_t>(i)];
        }
        Eigen::Index pick = 0;
        if (total > 0.0) {
            double r = uniform01(rng) * total;
            for (pick = 0; pick < n - 1; ++pick) {
                r -= dist[static_cast<std::size_t>(pick)];
                if (r <= 0.0 && dist[static_cast<std::size_t>(pick)] > 0.0) break;
            }
        }
        centers.row(c) = X.row(pick);
    }

    std::vector<Eigen::Index> assign(static_cast<std::size_t>(n), -1);
    for (int it = 0; it < iterations; ++it) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::Index best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (Eigen::Index c = 0; c < m; ++c) {
                const double d = (X.row(i) - centers.row(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assign[static_cast<std::size_t>(i)] != best) {
                assign[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }
        if (!changed) break;
        Matrix sums = Matrix::Zero(m, X.cols());
        std::vector<int> counts(static_cast<std::size_t>(m), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(assign[static_cast<std::size_t>(i)]) += X.row(i);
            ++counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
        }
        for (Eigen::Index c = 0; c < m; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
        }
    }
    return centers;
}

GpModel fit_sparse_with_inducing(const Dataset& data, const Matrix& inducing, const kernels::KernelParams& params,
                                 double noise) {
    if (data.empty()) throw InputError("sparse fit needs at least one observation");
    if (inducing.rows() < 1 || inducing.rows() > static_cast<Eigen::Index>(data.size())) {
        throw ParameterError("sparse fit needs 1 <= m <= n inducing points");
    }
    if (inducing.cols() != data.dim()) throw InputError("inducing points have wrong dimension");
    GpModel model = make_prior(data.box(), params, noise);
    model.load_data(data);
    model.variant_ = Variant::sparse;

    SparseState s;
    s.inducing.resize(inducing.rows(), inducing.cols());
    for (Eigen::Index j = 0; j < inducing.rows(); ++j) {
        s.inducing.row(j) = data.box().to_unit(inducing.row(j).transpose()).transpose();
    }
    const Matrix Kzz = kernels::gram(s.inducing, params);
    // K_zz carries no observation noise. Any jitter here perturbs the
    // Nystrom term directly, so try without first and escalate from a tiny
    // relative amount.
    s.kzz_factor.compute(Kzz);
    s.kzz_jitter = 0.0;
    if (!factor_ok(s.kzz_factor)) {
        const double base = 1e-12 * params.prior_variance();
        s.kzz_jitter = base + factorize_with_jitter(Kzz, base, s.kzz_factor);
    }

    const Matrix Kzx = kernels::cross(s.inducing, model.inputs_, params);
    const double sigma = std::sqrt(noise);
    const Matrix W = s.kzz_factor.matrixL().solve(Kzx) / sigma;  // m x n
    Matrix B = W * W.transpose();
    B.diagonal().array() += 1.0;
    const Eigen::LLT<Matrix> Bf(B);
    if (!factor_ok(Bf)) throw NumericalError("sparse inner system is not positive definite");

    const Eigen::Index mz = s.inducing.rows();
    s.whitened_cov = Bf.solve(Matrix::Identity(mz, mz));
    s.whitened_mean = Bf.solve(W * model.targets_) / sigma;
    const Matrix L = s.kzz_factor.matrixL();
    s.mu_u = L * s.whitened_mean;
    s.sigma_u = L * s.whitened_cov * L.transpose();
    model.sparse_ = std::move(s);
    return model;
}

GpModel fit_sparse(const Dataset& data, Eigen::Index m, const kernels::KernelParams& params, double noise,
                   std::uint64_t seed) {
    const auto n = static_cast<Eigen::Index>(data.size());
    if (m < 1 || m > n) throw ParameterError("sparse fit needs 1 <= m <= n inducing points");
    if (m == n) return fit_sparse_with_inducing(data, data.inputs(), params, noise);
    Matrix unit(n, data.dim());
    for (Eigen::Index i = 0; i < n; ++i) unit.row(i) = data.box().to_unit(data.x(static_cast<std::size_t>(i))).transpose();
    const Matrix centers = kmeans_centers(unit, m, seed);
    Matrix original(m, data.dim());
    for (Eigen::Index j = 0; j < m; ++j) original.row(j) = data.box().from_unit(centers.row(j).transpose()).transpose();
    return fit_sparse_with_inducing(data, original, params, noise);
}

Prediction predict_sparse(const GpModel& model, const Vector& x) {
    if (model.variant() != Variant::sparse) throw UnsupportedError("predict_sparse needs a sparse model");
    return model.predict(x);
}

namespace {

struct EvidenceTerms {
    double loss = 0.0;  // negative log evidence
    Matrix grad_phi;    // n x D
};

// Negative log evidence of y under y ~ N(0, I/beta + Phi Phi^T / alpha).
EvidenceTerms deep_evidence(const Matrix& Phi, const Vector& y, double beta, double alpha, bool need_grad) {
    const Eigen::Index n = Phi.rows();
    Matrix C = Phi * Phi.transpose() / alpha;
    C.diagonal().array() += 1.0 / beta;
    const Eigen::LLT<Matrix> Cf(C);
    if (!factor_ok(Cf)) throw NumericalError("deep-feature evidence covariance is not positive definite");
    const Vector a = Cf.solve(y);
    EvidenceTerms t;
    t.loss = 0.5 * y.dot(a) + Cf.matrixLLT().diagonal().array().log().sum() + 0.5 * static_cast<double>(n) * kLog2Pi;
    if (need_grad) {
        const Matrix Cinv = Cf.solve(Matrix::Identity(n, n));
        t.grad_phi = (Cinv - a * a.transpose()) * Phi / alpha;
    }
    return t;
}

}  // namespace

GpModel fit_deep(const Dataset& data, const DeepConfig& config) {
    if (data.empty()) throw InputError("deep fit needs at least one observation");
    if (config.epochs < 1) throw ParameterError("deep fit needs epochs >= 1");
    if (!(config.beta > 0.0) || !(config.prior_precision > 0.0)) throw ParameterError("deep precisions must be positive");
    const Eigen::Index d = data.dim();

    GpModel model;
    model.variant_ = Variant::deep;
    model.params_ = kernels::KernelParams::defaults(d);
    model.noise_ = 1.0 / config.beta;
    model.load_data(data);

    DeepFeatureState s;
    s.beta = config.beta;
    s.prior_precision = config.prior_precision;
    if (config.identity_features) {
        if (config.feature_dim != d) throw ParameterError("identity features need feature_dim == input dimension");
        net::Layer layer;
        layer.weight = Matrix::Identity(d, d);
        layer.bias = Vector::Zero(d);
        s.features.layers.push_back(std::move(layer));
    } else {
        if (config.feature_dim < 1) throw ParameterError("feature_dim must be >= 1");
        s.features = net::init_params({d, config.hidden, config.feature_dim}, net::Activation::tanh,
                                      net::Activation::identity, config.seed);
    }

    const Matrix inputs_t = model.inputs_.transpose();  // d x n
    const Vector& y = model.targets_;
    net::AdamState opt = net::make_adam(s.features, config.learning_rate);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        net::ForwardCache cache;
        const Matrix Phi_t = net::forward(s.features, inputs_t, &cache);  // D x n
        const bool train = config.learning_rate > 0.0;
        const EvidenceTerms t = deep_evidence(Phi_t.transpose(), y, s.beta, s.prior_precision, train);
        if (!std::isfinite(t.loss)) {
            throw NumericalError("deep-feature training produced a non-finite loss at epoch " + std::to_string(epoch));
        }
        s.loss_history.push_back(t.loss);
        if (!train) continue;
        const net::BackwardResult g = net::backward(s.features, cache, t.grad_phi.transpose());
        if (!net::adam_step(opt, s.features, g.params)) {
            throw NumericalError("deep-feature training produced non-finite gradients at epoch " + std::to_string(epoch));
        }
    }

    const Matrix Phi = net::forward(s.features, inputs_t).transpose();  // n x D
    Matrix K = s.beta * Phi.transpose() * Phi;
    K.diagonal().array() += s.prior_precision;
    s.precision.compute(K);
    if (!factor_ok(s.precision)) throw NumericalError("deep-feature head precision is not positive definite");
    s.head_mean = s.beta * s.precision.solve(Phi.transpose() * y);
    model.deep_ = std::move(s);
    return model;
}

double posterior_cdf(const GpModel& model, const Vector& x, double z) {
    const Prediction p = model.predict(x);
    if (!(p.variance > 0.0)) return z >= p.mean ? 1.0 : 0.0;
    return normal_cdf((z - p.mean) / std::sqrt(p.variance));
}

double posterior_cov(const GpModel& model, const Vector& x, const Vector& xp) {
    if (model.variant() != Variant::exact) {
        throw UnsupportedError("posterior covariance is only available for the exact variant");
    }
    if (x.size() != model.box().dim() || xp.size() != model.box().dim()) throw InputError("dimension mismatch");
    const Vector u = model.box().to_unit(x);
    const Vector up = model.box().to_unit(xp);
    double c = kernels::mixture(u, up, model.params_);
    if (model.size() > 0) {
        const Vector v = model.factor_.matrixL().solve(kernels::cross(model.inputs_, u, model.params_));
        const Vector vp = model.factor_.matrixL().solve(kernels::cross(model.inputs_, up, model.params_));
        c -= v.dot(vp);
    }
    return model.y_scale_ * model.y_scale_ * c;
}

DuelResult prob_duel(const GpModel& model, const Vector& x, const Vector& xp) {
    if (model.variant() != Variant::exact) throw UnsupportedError("probability of duel needs the exact variant");
    const Prediction a = model.predict(x);
    const Prediction b = model.predict(xp);
    const double var = a.variance + b.variance - 2.0 * posterior_cov(model, x, xp);
    DuelResult r;
    const double scale = std::max(a.variance + b.variance, std::numeric_limits<double>::min());
    if (!(var > 1e-12 * scale)) {
        // No joint uncertainty left in the difference: a step at zero.
        r.degenerate = true;
        r.probability = a.mean > b.mean ? 1.0 : (a.mean < b.mean ? 0.0 : 0.5);
        return r;
    }
    r.probability = normal_cdf((a.mean - b.mean) / std::sqrt(var));
    return r;
}

}  // namespace rebmbo::gp
