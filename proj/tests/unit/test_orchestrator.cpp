#include <cmath>

#include "doctest.h"
#include "rebmbo/experiment.hpp"
#include "rebmbo/metrics.hpp"
#include "rebmbo/orchestrator.hpp"

using namespace rebmbo;
namespace orc = rebmbo::orchestrator;

namespace {

// Small networks so a full loop runs in well under a second.
RunConfig quick(Method m, int T = 8, std::uint64_t seed = 0) {
    RunConfig c;
    c.method = m;
    c.iterations = T;
    c.seed = seed;
    c.warmup = std::min(3, T);
    c.gp.hyper_budget = 40;
    c.gp.hyper_starts = 2;
    c.ebm.hidden = 16;
    c.ebm.inner = 16;
    c.ebm.epochs = 3;
    c.ppo.hidden = 16;
    c.acquisition.n_candidates = 128;
    c.gp.deep.epochs = 20;
    return c;
}

std::vector<Vector> points(const RunTrace& t) {
    std::vector<Vector> out;
    for (const auto& r : t.records) out.push_back(r.x);
    return out;
}

}  // namespace

TEST_CASE("memoized objective") {
    int calls = 0;
    orc::MemoizedObjective f([&](const Vector& x) {
        ++calls;
        return x.sum();
    });
    const Vector a{{0.1, 0.2}};
    CHECK(f(a) == std::pair<double, bool>{a.sum(), false});
    CHECK(f(Vector{{0.1 + 1e-13, 0.2}}).second);
    CHECK_FALSE(f(Vector{{0.1 + 1e-9, 0.2}}).second);
    CHECK(f.calls() == 2);
    CHECK(calls == 2);
    orc::MemoizedObjective bad([](const Vector&) { return std::nan(""); });
    CHECK_THROWS_AS(bad(a), NumericalError);
}

TEST_CASE("streams are independent and reproducible") {
    auto a = orc::make_stream(3, 1), b = orc::make_stream(3, 1), c = orc::make_stream(3, 2), d = orc::make_stream(4, 1);
    const auto va = a();
    CHECK(va == b());
    CHECK(va != c());
    CHECK(va != d());
    CHECK(orc::make_stream(3, 8, 1)() != orc::make_stream(3, 8, 2)());
}

TEST_CASE("variant selection") {
    CHECK(orc::select_variant(Method::rebmbo_c) == gp::Variant::exact);
    CHECK(orc::select_variant(Method::rebmbo_s) == gp::Variant::sparse);
    CHECK(orc::select_variant(Method::rebmbo_d) == gp::Variant::deep);
    CHECK(orc::select_variant(Method::gp_ucb) == gp::Variant::exact);
    CHECK_THROWS_AS(orc::select_variant(Method::random), UnsupportedError);
}

TEST_CASE("one iteration with one warmup step uses the acquisition") {
    auto c = quick(Method::rebmbo_c, 1);
    c.warmup = 1;
    const auto t = orc::run(c);
    REQUIRE(t.records.size() == 1);
    CHECK(t.records[0].selector == "acquisition");
    CHECK(t.records[0].acquisition_score);
    CHECK(t.records[0].energy_raw);
    CHECK(t.records[0].ppo);
}

TEST_CASE("loop bookkeeping for every method") {
    for (Method m : {Method::rebmbo_c, Method::rebmbo_s, Method::rebmbo_d, Method::gp_ucb, Method::random}) {
        CAPTURE(to_string(m));
        const auto c = quick(m);
        const auto t = orc::run(c);
        const int n0 = default_initial_design(2);
        CHECK(t.initial_y.size() == static_cast<std::size_t>(n0));
        CHECK(t.records.size() == 8);
        int hits = 0;
        double best = *std::max_element(t.initial_y.begin(), t.initial_y.end());
        for (std::size_t i = 0; i < t.records.size(); ++i) {
            const auto& r = t.records[i];
            CHECK(r.t == static_cast<int>(i) + 1);
            CHECK(t.benchmark.box.contains(r.x));
            CHECK(r.y == t.benchmark.evaluate(r.x));
            best = std::max(best, r.y);
            CHECK(r.best_y == best);
            if (i > 0) CHECK(r.best_y >= t.records[i - 1].best_y);
            CHECK(r.regret_simple == doctest::Approx(metrics::simple_regret(t)[i]));
            CHECK(r.regret_simple >= -1e-9);
            hits += r.memo_hit;
            if (m == Method::random) CHECK(r.selector == "random");
            if (m == Method::gp_ucb) CHECK(r.selector == "acquisition");
            if (m == Method::rebmbo_c) CHECK(r.selector == (r.t <= 3 ? "acquisition" : "policy"));
        }
        CHECK(t.evaluations + hits == n0 + 8);
        CHECK(t.status == "ok");
        CHECK(t.run_id == "branin-" + to_string(m) + "-s0");
    }
}

TEST_CASE("runs are deterministic") {
    for (Method m : {Method::rebmbo_c, Method::rebmbo_d, Method::random}) {
        const auto c = quick(m, 6, 11);
        const auto a = experiment::dump(experiment::trace_to_json(orc::run(c)));
        const auto b = experiment::dump(experiment::trace_to_json(orc::run(c)));
        CHECK(a == b);
        auto other = c;
        other.seed = 12;
        CHECK(a != experiment::dump(experiment::trace_to_json(orc::run(other))));
    }
}

TEST_CASE("without energy, reward shaping or policy the loop is GP-UCB") {
    auto c = quick(Method::rebmbo_c, 6, 3);
    c.acquisition.gamma = 0.0;
    c.ppo.lambda = 0.0;
    c.warmup = 6;
    auto g = c;
    g.method = Method::gp_ucb;
    CHECK(points(orc::run(c)) == points(orc::run(g)));
    c.always_acquisition = true;
    c.warmup = 2;
    CHECK(points(orc::run(c)) == points(orc::run(g)));
}

TEST_CASE("sparse path with enough inducing points follows the exact path") {
    auto c = quick(Method::rebmbo_c, 4, 5);
    c.gp.sparse_inducing = 100;
    auto s = c;
    s.method = Method::rebmbo_s;
    const auto a = orc::run(c), b = orc::run(s);
    for (std::size_t i = 0; i < 2; ++i) CHECK((a.records[i].x - b.records[i].x).norm() < 1e-4);
}

TEST_CASE("long random search gets close") {
    auto c = quick(Method::random, 10000);
    const auto t = orc::run(c);
    CHECK(t.records.back().regret_simple < 0.5);
}

TEST_CASE("a failing objective surfaces the partial trace") {
    int calls = 0;
    const auto spec = benchmarks::lookup("branin");
    auto f = [&](const Vector& x) { return ++calls > 8 ? std::nan("") : spec.evaluate(x); };
    auto c = quick(Method::gp_ucb, 6);
    try {
        orc::run(c, f);
        FAIL("expected a failure");
    } catch (const orc::RunFailure& e) {
        CHECK(e.partial.status == "failed");
        CHECK(e.partial.records.size() == 8 - 5);
        CHECK(e.partial.error.find("iteration 4") != std::string::npos);
    }
}

TEST_CASE("config checks") {
    auto c = quick(Method::rebmbo_c);
    c.warmup = 9;
    CHECK_THROWS_AS(orc::run(c), ParameterError);
    c = quick(Method::rebmbo_c);
    c.iterations = 0;
    CHECK_THROWS_AS(orc::run(c), ParameterError);
    c = quick(Method::rebmbo_c);
    c.benchmark = "nope";
    CHECK_THROWS_AS(orc::run(c), LookupError);
    CHECK_THROWS_AS(orc::run_gp_ucb(quick(Method::random)), ParameterError);
    CHECK(default_initial_design(1) == 5);
    CHECK(default_initial_design(4) == 8);
    CHECK(default_initial_design(200) == 20);
}
