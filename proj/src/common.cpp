#include "rebmbo/common.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rebmbo {

Box::Box(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != upper_.size() || lower_.size() == 0) {
        throw InputError("box bounds must be non-empty and of equal length");
    }
    for (Eigen::Index i = 0; i < lower_.size(); ++i) {
        if (!(lower_[i] < upper_[i])) {
            throw InputError("box lower bound must be below upper bound in every dimension");
        }
    }
}

Box::Box(std::size_t dim, double lower, double upper)
    : Box(Vector::Constant(static_cast<Eigen::Index>(dim), lower),
          Vector::Constant(static_cast<Eigen::Index>(dim), upper)) {}

bool Box::contains(const Vector& x, double tol) const {
    if (x.size() != dim()) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol) return false;
    }
    return true;
}

Vector Box::clamp(const Vector& x) const { return x.cwiseMax(lower_).cwiseMin(upper_); }

Vector Box::to_unit(const Vector& x) const {
    return (x - lower_).cwiseQuotient(upper_ - lower_);
}

Vector Box::from_unit(const Vector& u) const {
    return lower_ + u.cwiseProduct(upper_ - lower_);
}

Vector Box::to_symmetric(const Vector& x) const {
    return 2.0 * to_unit(x) - Vector::Ones(x.size());
}

Vector Box::from_symmetric(const Vector& z) const {
    return from_unit(0.5 * (z + Vector::Ones(z.size())));
}

void Dataset::add(const Vector& x, double y) {
    if (x.size() != box_.dim()) throw InputError("observation dimension does not match dataset box");
    if (!std::isfinite(y) || !x.allFinite()) throw InputError("observations must be finite");
    xs_.push_back(x);
    ys_.push_back(y);
}

Matrix Dataset::inputs() const {
    Matrix X(static_cast<Eigen::Index>(xs_.size()), box_.dim());
    for (std::size_t i = 0; i < xs_.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = xs_[i].transpose();
    return X;
}

Vector Dataset::targets() const {
    return Eigen::Map<const Vector>(ys_.data(), static_cast<Eigen::Index>(ys_.size()));
}

std::size_t Dataset::argmax() const {
    if (ys_.empty()) throw InputError("argmax of an empty dataset");
    return static_cast<std::size_t>(std::distance(ys_.begin(), std::max_element(ys_.begin(), ys_.end())));
}

Matrix latin_hypercube(const Box& box, Eigen::Index n, Rng& rng) {
    const Eigen::Index d = box.dim();
    Matrix out(n, d);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < d; ++j) {
        std::iota(perm.begin(), perm.end(), Eigen::Index{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double u = (static_cast<double>(perm[static_cast<std::size_t>(i)]) + uniform01(rng)) /
                             static_cast<double>(n);
            out(i, j) = box.lower()[j] + u * (box.upper()[j] - box.lower()[j]);
        }
    }
    return out;
}

double standard_normal(Rng& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    return dist(rng);
}

double uniform01(Rng& rng) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    return dist(rng);
}

Vector standard_normal_vector(Eigen::Index n, Rng& rng) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = standard_normal(rng);
    return v;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace rebmbo
