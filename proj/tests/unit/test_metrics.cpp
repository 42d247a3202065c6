#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "rebmbo/metrics.hpp"

using namespace rebmbo;
namespace mt = rebmbo::metrics;

namespace {

RunTrace synthetic_trace(const std::vector<double>& ys, std::uint64_t seed, bool energies = true) {
    RunTrace t;
    t.config.method = Method::rebmbo_c;
    t.config.seed = seed;
    t.config.dim = 2;
    t.benchmark = benchmarks::lookup("branin");
    t.initial_y = {-30.0, -20.0};
    Rng rng(seed);
    for (std::size_t i = 0; i < ys.size(); ++i) {
        IterationRecord r;
        r.t = static_cast<int>(i) + 1;
        r.y = ys[i];
        if (energies) {
            r.energy_raw = standard_normal(rng);
            r.energy_opt = standard_normal(rng);
        }
        t.records.push_back(r);
    }
    return t;
}

}  // namespace

TEST_CASE("instantaneous regret") {
    const double f_opt = benchmarks::lookup("branin").optimum_value;
    CHECK(mt::instantaneous_regret(f_opt, f_opt) == 0.0);
    CHECK(mt::instantaneous_regret(f_opt, -1.0) == doctest::Approx(0.602113).epsilon(1e-6));
    CHECK(mt::instantaneous_regret(f_opt, 2.0) - mt::instantaneous_regret(f_opt, 2.5) == doctest::Approx(0.5));
}

TEST_CASE("simple regret is the prefix minimum") {
    Rng rng(1);
    std::vector<double> ys(50);
    for (auto& y : ys) y = -10 * uniform01(rng);
    const auto s = mt::simple_regret(ys, 0.0);
    for (std::size_t t = 0; t < ys.size(); ++t) {
        double best = 1e300;
        for (std::size_t k = 0; k <= t; ++k) best = std::min(best, -ys[k]);
        CHECK(s[t] == best);
        if (t > 0) CHECK(s[t] <= s[t - 1]);
    }
    CHECK(mt::simple_regret({-2, -2, -2}, 0.0) == std::vector<double>{2, 2, 2});
    CHECK(mt::simple_regret({-5, -1}, 0.0, -3.0) == std::vector<double>{3, 1});
    // Trace version starts from the best initial observation (-20).
    CHECK(mt::simple_regret(synthetic_trace({-25.0, -10.0}, 0)).front() ==
          doctest::Approx(mt::instantaneous_regret(benchmarks::lookup("branin").optimum_value, -20.0)));
}

TEST_CASE("LAR identities") {
    Rng rng(2);
    std::vector<double> ys(30), eo(30), ex(30);
    for (int i = 0; i < 30; ++i) {
        ys[i] = -5 * uniform01(rng);
        eo[i] = standard_normal(rng);
        ex[i] = standard_normal(rng);
    }
    const double f = -0.397887;
    const auto zero = mt::lar(ys, f, eo, ex, 0.0);
    for (int i = 0; i < 30; ++i) CHECK(zero[i] == mt::instantaneous_regret(f, ys[i]));

    std::vector<double> eo2 = eo, ex2 = ex;
    for (int i = 0; i < 30; ++i) {
        eo2[i] += 123.5;
        ex2[i] += 123.5;
    }
    const auto a = mt::lar(ys, f, eo, ex, 0.3), b = mt::lar(ys, f, eo2, ex2, 0.3);
    for (int i = 0; i < 30; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-13);
    CHECK(mt::lar({f}, f, {0.7}, {0.7}, 0.3)[0] == 0.0);
    CHECK(mt::lar({-1.0}, 0.0, {2.0}, {1.0}, 0.3)[0] == doctest::Approx(1.3));
    CHECK_THROWS_AS(mt::lar({1.0, 2.0}, 0.0, {1.0}, {1.0}, 0.3), InputError);
    CHECK_THROWS_AS(mt::lar(synthetic_trace({-1.0}, 0, false), 0.3), InputError);

    const auto tr = synthetic_trace({-3.0, -1.0, -2.0}, 5);
    const auto series = mt::regret_series(tr, 0.0);
    REQUIRE(series.lar);
    CHECK(*series.lar == series.instantaneous);
    CHECK(series.cumulative.back() == doctest::Approx(series.instantaneous[0] + series.instantaneous[1] +
                                                      series.instantaneous[2]));
    CHECK_FALSE(mt::regret_series(synthetic_trace({-1.0}, 0, false)).lar);
}

TEST_CASE("summaries across seeds") {
    CHECK(mt::mean_std({1, 2, 3, 4, 5}).mean == 3.0);
    CHECK(mt::mean_std({1, 2, 3, 4, 5}).std == doctest::Approx(std::sqrt(2.5)));

    std::vector<RunTrace> five;
    for (int s = 0; s < 5; ++s) five.push_back(synthetic_trace({-1.0 - s, -0.5 - s}, s));
    const auto sum = mt::summarize(five, {1, 2});
    REQUIRE(sum.simple_regret.size() == 2);
    std::vector<double> at2;
    for (const auto& t : five) at2.push_back(mt::simple_regret(t)[1]);
    CHECK(sum.simple_regret[1].mean == doctest::Approx(mt::mean_std(at2).mean));
    CHECK(sum.simple_regret[1].std == doctest::Approx(mt::mean_std(at2).std));
    CHECK(sum.simple_regret[1].count == 5);
    CHECK(sum.lar);
    CHECK_FALSE(sum.single_run);

    const auto single = mt::summarize({five[0]}, {2});
    CHECK(single.single_run);
    CHECK(single.simple_regret[0].std == 0.0);

    const std::vector<RunTrace> dup(5, five[0]);
    const auto d = mt::summarize(dup, {});
    CHECK(d.simple_regret.size() == 1);
    CHECK(d.simple_regret[0].t == 2);
    CHECK(d.simple_regret[0].std == 0.0);

    const auto clamped = mt::summarize(five, {10});
    CHECK(clamped.simple_regret[0].t == 2);
    CHECK(clamped.warnings.size() == 1);

    auto other = five;
    other[1].config.method = Method::random;
    CHECK_THROWS_AS(mt::summarize(other, {1}), InputError);
    other = five;
    other[2].records.pop_back();
    CHECK_THROWS_AS(mt::summarize(other, {1}), InputError);
    CHECK_THROWS_AS(mt::summarize({}, {1}), InputError);
}
