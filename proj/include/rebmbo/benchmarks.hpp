#ifndef REBMBO_BENCHMARKS_HPP
#define REBMBO_BENCHMARKS_HPP

#include <optional>
#include <string>
#include <vector>

#include "rebmbo/common.hpp"

namespace rebmbo::benchmarks {

// Raw textbook formulas. Branin, Ackley and Rosenbrock are minimization
// problems in their usual form; the framework maximizes sign * raw.
double branin(const Vector& x);
double ackley(const Vector& x, double a = 20.0, double b = 0.2, double c = 2.0 * 3.14159265358979323846);
double rosenbrock(const Vector& x);
double hdbo_sum_exp(const Vector& x);

struct BenchmarkSpec {
    std::string name;
    std::size_t dim = 0;
    Box box;
    double optimum_value = 0.0;  // max of sign * raw over the box
    std::vector<Vector> optimizer_points;
    int sign = 1;

    /// Framework objective (always maximized).
    [[nodiscard]] double evaluate(const Vector& x) const;
    [[nodiscard]] double raw(const Vector& x) const;
};

/// Known names: branin, ackley, rosenbrock, hdbo.
BenchmarkSpec lookup(const std::string& name, std::optional<std::size_t> dim_override = std::nullopt);

const std::vector<std::string>& names();

}  // namespace rebmbo::benchmarks

#endif  // REBMBO_BENCHMARKS_HPP
