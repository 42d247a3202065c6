#include "rebmbo/benchmarks.hpp"

#include <cmath>
#include <numbers>

namespace rebmbo::benchmarks {

namespace {

constexpr double kPi = std::numbers::pi;

// Located by grid search plus Nelder-Mead refinement over [-5,10]x[0,15];
// the refinement lands on these closed forms to 1e-12 (see test_benchmarks).
constexpr double kBraninMinimum = 5.0 / (4.0 * kPi);

void require_dim(const Vector& x, Eigen::Index min_dim, const char* what) {
    if (x.size() < min_dim) throw InputError(std::string(what) + ": input dimension too small");
    if (!x.allFinite()) throw InputError(std::string(what) + ": input must be finite");
}

}  // namespace

double branin(const Vector& x) {
    if (x.size() != 2) throw InputError("branin: expects a 2-vector");
    require_dim(x, 2, "branin");
    const double x1 = x[0];
    const double x2 = x[1];
    const double b = 5.1 / (4.0 * kPi * kPi);
    const double c = 5.0 / kPi;
    const double t = 1.0 / (8.0 * kPi);
    const double q = x2 - b * x1 * x1 + c * x1 - 6.0;
    return q * q + 10.0 * (1.0 - t) * std::cos(x1) + 10.0;
}

double ackley(const Vector& x, double a, double b, double c) {
    require_dim(x, 1, "ackley");
    const double d = static_cast<double>(x.size());
    const double mean_sq = x.squaredNorm() / d;
    const double mean_cos = (c * x.array()).cos().sum() / d;
    // Grouped so the origin evaluates to exactly zero.
    return (a - a * std::exp(-b * std::sqrt(mean_sq))) + (std::numbers::e - std::exp(mean_cos));
}

double rosenbrock(const Vector& x) {
    require_dim(x, 2, "rosenbrock");
    double sum = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = 1.0 - x[i];
        sum += 100.0 * a * a + b * b;
    }
    return sum;
}

double hdbo_sum_exp(const Vector& x) {
    require_dim(x, 1, "hdbo");
    return x.array().exp().sum();
}

double BenchmarkSpec::raw(const Vector& x) const {
    if (x.size() != static_cast<Eigen::Index>(dim)) {
        throw InputError(name + ": expected dimension " + std::to_string(dim) + ", got " +
                         std::to_string(x.size()));
    }
    if (name == "branin") return branin(x);
    if (name == "ackley") return ackley(x);
    if (name == "rosenbrock") return rosenbrock(x);
    if (name == "hdbo") return hdbo_sum_exp(x);
    throw LookupError("unknown benchmark: " + name);
}

double BenchmarkSpec::evaluate(const Vector& x) const { return sign * raw(x); }

const std::vector<std::string>& names() {
    static const std::vector<std::string> kNames{"branin", "ackley", "rosenbrock", "hdbo"};
    return kNames;
}

BenchmarkSpec lookup(const std::string& name, std::optional<std::size_t> dim_override) {
    BenchmarkSpec spec;
    spec.name = name;
    if (name == "branin") {
        if (dim_override && *dim_override != 2) throw InputError("branin is fixed at dimension 2");
        spec.dim = 2;
        spec.box = Box(Vector{{-5.0, 0.0}}, Vector{{10.0, 15.0}});
        spec.sign = -1;
        spec.optimum_value = -kBraninMinimum;
        spec.optimizer_points = {Vector{{-kPi, 12.275}}, Vector{{kPi, 2.275}}, Vector{{3.0 * kPi, 2.475}}};
        return spec;
    }
    if (name == "ackley") {
        spec.dim = dim_override.value_or(5);
        if (spec.dim < 1) throw InputError("ackley needs dimension >= 1");
        spec.box = Box(spec.dim, -32.768, 32.768);
        spec.sign = -1;
        spec.optimum_value = 0.0;
        spec.optimizer_points = {Vector::Zero(static_cast<Eigen::Index>(spec.dim))};
        return spec;
    }
    if (name == "rosenbrock") {
        spec.dim = dim_override.value_or(8);
        if (spec.dim < 2) throw InputError("rosenbrock needs dimension >= 2");
        spec.box = Box(spec.dim, -2.0, 2.0);
        spec.sign = -1;
        spec.optimum_value = 0.0;
        spec.optimizer_points = {Vector::Ones(static_cast<Eigen::Index>(spec.dim))};
        return spec;
    }
    if (name == "hdbo") {
        spec.dim = dim_override.value_or(200);
        if (spec.dim < 1) throw InputError("hdbo needs dimension >= 1");
        spec.box = Box(spec.dim, -5.0, 5.0);
        spec.sign = 1;
        const auto n = static_cast<Eigen::Index>(spec.dim);
        spec.optimizer_points = {Vector::Constant(n, 5.0)};
        spec.optimum_value = hdbo_sum_exp(spec.optimizer_points.front());
        return spec;
    }
    throw LookupError("unknown benchmark: " + name);
}

}  // namespace rebmbo::benchmarks
