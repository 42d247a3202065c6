#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rebmbo/benchmarks.hpp"

using namespace rebmbo;
namespace bm = rebmbo::benchmarks;

namespace {

double branin_oracle(double x1, double x2) {
    const double pi = std::numbers::pi;
    const double b = 5.1 / (4 * pi * pi), c = 5 / pi, t = 1 / (8 * pi);
    const double q = x2 - b * x1 * x1 + c * x1 - 6;
    return q * q + 10 * (1 - t) * std::cos(x1) + 10;
}

// Compass search down to a 1e-13 step; independent of the library's own optimizers.
Vector refine(Vector x, double step) {
    double f = branin_oracle(x[0], x[1]);
    while (step > 1e-13) {
        bool moved = false;
        for (int i = 0; i < 2; ++i) {
            for (double s : {step, -step}) {
                Vector y = x;
                y[i] += s;
                const double fy = branin_oracle(y[0], y[1]);
                if (fy < f) {
                    x = y;
                    f = fy;
                    moved = true;
                }
            }
        }
        if (!moved) step *= 0.5;
    }
    return x;
}

}  // namespace

TEST_CASE("anchors are exact") {
    for (int d : {1, 2, 5, 10}) {
        CHECK(bm::ackley(Vector::Zero(d)) == 0.0);
        CHECK(bm::hdbo_sum_exp(Vector::Zero(d)) == static_cast<double>(d));
    }
    for (int d : {2, 3, 8}) CHECK(bm::rosenbrock(Vector::Ones(d)) == 0.0);
}

TEST_CASE("branin matches the textbook formula") {
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const double a = -5 + 15 * uniform01(rng), b = 15 * uniform01(rng);
        CHECK(bm::branin(Vector{{a, b}}) == doctest::Approx(branin_oracle(a, b)).epsilon(1e-14));
    }
}

TEST_CASE("branin optimum from grid search and refinement") {
    // 0.025 grid over the box, then the best point in each basin refined.
    const int n = 601;
    std::vector<Vector> best(3);
    std::vector<double> best_f(3, 1e300);
    const double pi = std::numbers::pi;
    const double centers[3] = {-pi, pi, 3 * pi};
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double a = -5 + 15.0 * i / (n - 1), b = 15.0 * j / (n - 1);
            const double f = branin_oracle(a, b);
            // Basins separate cleanly along x1.
            int k = 0;
            for (int c = 1; c < 3; ++c)
                if (std::abs(a - centers[c]) < std::abs(a - centers[k])) k = c;
            if (f < best_f[k]) {
                best_f[k] = f;
                best[k] = Vector{{a, b}};
            }
        }
    }
    const auto spec = bm::lookup("branin");
    REQUIRE(spec.optimizer_points.size() == 3);
    for (int k = 0; k < 3; ++k) {
        const Vector x = refine(best[k], 0.025);
        const double f = branin_oracle(x[0], x[1]);
        CHECK(f == doctest::Approx(-spec.optimum_value).epsilon(1e-12));
        CHECK((x - spec.optimizer_points[k]).norm() < 1e-5);
        CHECK(spec.evaluate(spec.optimizer_points[k]) == doctest::Approx(spec.optimum_value).epsilon(1e-12));
    }
    CHECK(spec.optimum_value == doctest::Approx(-0.397887).epsilon(1e-6));
}

TEST_CASE("evaluate is sign times raw and optimum is a maximum") {
    Rng rng(11);
    for (const auto& name : bm::names()) {
        const auto spec = bm::lookup(name, name == "hdbo" ? std::optional<std::size_t>(6) : std::nullopt);
        CHECK(spec.box.dim() == static_cast<Eigen::Index>(spec.dim));
        for (const auto& x : spec.optimizer_points) {
            CHECK(spec.box.contains(x));
            CHECK(spec.evaluate(x) == doctest::Approx(spec.optimum_value).epsilon(1e-12));
        }
        const Matrix X = latin_hypercube(spec.box, 200, rng);
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            const Vector x = X.row(i).transpose();
            CHECK(spec.evaluate(x) == spec.sign * spec.raw(x));
            CHECK(spec.evaluate(x) <= spec.optimum_value + 1e-12);
        }
    }
}

TEST_CASE("default dimensions and boxes") {
    CHECK(bm::lookup("branin").dim == 2);
    CHECK(bm::lookup("ackley").dim == 5);
    CHECK(bm::lookup("rosenbrock").dim == 8);
    CHECK(bm::lookup("hdbo").dim == 200);
    CHECK(bm::lookup("ackley", 3).box.upper()[2] == 32.768);
    CHECK(bm::lookup("hdbo", 4).optimum_value == doctest::Approx(4 * std::exp(5.0)));
}

TEST_CASE("lookup errors") {
    CHECK_THROWS_AS(bm::lookup("levy"), LookupError);
    CHECK_THROWS_AS(bm::lookup("branin", 3), InputError);
    CHECK_THROWS_AS(bm::lookup("rosenbrock", 1), InputError);
    CHECK_THROWS_AS(bm::lookup("ackley", 0), InputError);
}
