#ifndef REBMBO_COMMON_HPP
#define REBMBO_COMMON_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rebmbo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

// Error taxonomy shared by every module. Callers that only care about
// "something went wrong" can catch Error.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InputError : Error {
    using Error::Error;
};
struct ParameterError : Error {
    using Error::Error;
};
struct NumericalError : Error {
    using Error::Error;
};
struct LookupError : Error {
    using Error::Error;
};
struct UnsupportedError : Error {
    using Error::Error;
};

/// Axis-aligned search domain. All public APIs take points in these
/// original units; models rescale internally.
class Box {
public:
    Box() = default;
    Box(Vector lower, Vector upper);
    Box(std::size_t dim, double lower, double upper);

    [[nodiscard]] Eigen::Index dim() const { return lower_.size(); }
    [[nodiscard]] const Vector& lower() const { return lower_; }
    [[nodiscard]] const Vector& upper() const { return upper_; }
    [[nodiscard]] Vector width() const { return upper_ - lower_; }

    [[nodiscard]] bool contains(const Vector& x, double tol = 0.0) const;
    [[nodiscard]] Vector clamp(const Vector& x) const;

    // [lower, upper] <-> [0, 1]
    [[nodiscard]] Vector to_unit(const Vector& x) const;
    [[nodiscard]] Vector from_unit(const Vector& u) const;
    // [lower, upper] <-> [-1, 1]
    [[nodiscard]] Vector to_symmetric(const Vector& x) const;
    [[nodiscard]] Vector from_symmetric(const Vector& z) const;

    bool operator==(const Box&) const = default;

private:
    Vector lower_;
    Vector upper_;
};

/// Ordered observation set D_t.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(Box box) : box_(std::move(box)) {}

    void add(const Vector& x, double y);

    [[nodiscard]] std::size_t size() const { return ys_.size(); }
    [[nodiscard]] bool empty() const { return ys_.empty(); }
    [[nodiscard]] Eigen::Index dim() const { return box_.dim(); }
    [[nodiscard]] const Box& box() const { return box_; }
    [[nodiscard]] const Vector& x(std::size_t i) const { return xs_[i]; }
    [[nodiscard]] double y(std::size_t i) const { return ys_[i]; }
    [[nodiscard]] const std::vector<Vector>& xs() const { return xs_; }
    [[nodiscard]] const std::vector<double>& ys() const { return ys_; }

    /// n x d matrix of inputs, one row per observation.
    [[nodiscard]] Matrix inputs() const;
    [[nodiscard]] Vector targets() const;
    [[nodiscard]] std::size_t argmax() const;

private:
    Box box_;
    std::vector<Vector> xs_;
    std::vector<double> ys_;
};

/// Latin-hypercube design of n points inside the box.
Matrix latin_hypercube(const Box& box, Eigen::Index n, Rng& rng);

/// Standard normal draw helpers; every stochastic component draws through
/// these so a run is reproducible from its seed.
double standard_normal(Rng& rng);
double uniform01(Rng& rng);
Vector standard_normal_vector(Eigen::Index n, Rng& rng);

/// Standard normal CDF.
double normal_cdf(double z);

}  // namespace rebmbo

#endif  // REBMBO_COMMON_HPP
