#include "rebmbo/kernels.hpp"

#include <cmath>

namespace rebmbo::kernels {

namespace {

const double kSqrt5 = std::sqrt(5.0);

// Unchecked inner evaluations; the public entry points validate once.
double rbf_unchecked(const Vector& x, const Vector& xp, const Vector& lengthscales) {
    double q = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double d = (x[i] - xp[i]) / lengthscales[i];
        q += d * d;
    }
    return std::exp(-0.5 * q);
}

double matern_unchecked(double r, double lengthscale) {
    const double s = kSqrt5 * r / lengthscale;
    return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

double mixture_unchecked(const Vector& x, const Vector& xp, const KernelParams& p) {
    double value = 0.0;
    if (p.w_rbf > 0.0) value += p.w_rbf * rbf_unchecked(x, xp, p.rbf_lengthscales);
    if (p.w_matern > 0.0) value += p.w_matern * matern_unchecked((x - xp).norm(), p.matern_lengthscale);
    return p.amplitude * value;
}

void check_dims(const Vector& x, const Vector& xp) {
    if (x.size() != xp.size()) throw InputError("kernel inputs differ in dimension");
}

}  // namespace

KernelParams KernelParams::defaults(Eigen::Index dim, double lengthscale) {
    KernelParams p;
    p.rbf_lengthscales = Vector::Constant(dim, lengthscale);
    p.matern_lengthscale = lengthscale;
    return p;
}

void KernelParams::validate() const {
    if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw ParameterError("kernel amplitude must be positive");
    if (rbf_lengthscales.size() == 0) throw ParameterError("rbf lengthscales are empty");
    if (!((rbf_lengthscales.array() > 0.0).all()) || !rbf_lengthscales.allFinite()) {
        throw ParameterError("rbf lengthscales must be positive");
    }
    if (!(matern_lengthscale > 0.0) || !std::isfinite(matern_lengthscale)) {
        throw ParameterError("matern lengthscale must be positive");
    }
    if (!(w_rbf >= 0.0) || !(w_matern >= 0.0) || !(w_rbf + w_matern > 0.0)) {
        throw ParameterError("mixture weights must be nonnegative with a positive sum");
    }
}

bool KernelParams::operator==(const KernelParams& o) const {
    return amplitude == o.amplitude && rbf_lengthscales == o.rbf_lengthscales &&
           matern_lengthscale == o.matern_lengthscale && w_rbf == o.w_rbf && w_matern == o.w_matern;
}

double rbf(const Vector& x, const Vector& xp, const Vector& lengthscales) {
    check_dims(x, xp);
    if (lengthscales.size() != x.size()) throw InputError("rbf lengthscale count does not match input dimension");
    if (!(lengthscales.array() > 0.0).all()) throw ParameterError("rbf lengthscales must be positive");
    return rbf_unchecked(x, xp, lengthscales);
}

double matern52(const Vector& x, const Vector& xp, double lengthscale) {
    check_dims(x, xp);
    if (!(lengthscale > 0.0)) throw ParameterError("matern lengthscale must be positive");
    return matern_unchecked((x - xp).norm(), lengthscale);
}

double mixture(const Vector& x, const Vector& xp, const KernelParams& params) {
    check_dims(x, xp);
    params.validate();
    if (params.rbf_lengthscales.size() != x.size()) {
        throw InputError("rbf lengthscale count does not match input dimension");
    }
    return mixture_unchecked(x, xp, params);
}

Matrix gram(const Matrix& X, const KernelParams& params) {
    params.validate();
    if (params.rbf_lengthscales.size() != X.cols()) {
        throw InputError("rbf lengthscale count does not match input dimension");
    }
    const Eigen::Index n = X.rows();
    Matrix G(n, n);
    std::vector<Vector> rows(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = X.row(i).transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
        G(i, i) = params.prior_variance();
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = mixture_unchecked(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(j)], params);
            G(i, j) = v;
            G(j, i) = v;
        }
    }
    return G;
}

Matrix cross(const Matrix& A, const Matrix& B, const KernelParams& params) {
    params.validate();
    if (A.cols() != B.cols() || params.rbf_lengthscales.size() != A.cols()) {
        throw InputError("cross covariance: dimension mismatch");
    }
    Matrix C(A.rows(), B.rows());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        const Vector a = A.row(i).transpose();
        for (Eigen::Index j = 0; j < B.rows(); ++j) {
            C(i, j) = mixture_unchecked(a, B.row(j).transpose(), params);
        }
    }
    return C;
}

Vector cross(const Matrix& X, const Vector& x, const KernelParams& params) {
    params.validate();
    if (X.cols() != x.size() || params.rbf_lengthscales.size() != x.size()) {
        throw InputError("cross covariance: dimension mismatch");
    }
    Vector k(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) k[i] = mixture_unchecked(X.row(i).transpose(), x, params);
    return k;
}

}  // namespace rebmbo::kernels
