#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rebmbo/experiment.hpp"
#include "rebmbo/metrics.hpp"
#include "rebmbo/orchestrator.hpp"

using namespace rebmbo;
namespace ex = rebmbo::experiment;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("rebmbo_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

// Small enough that a six-run sweep takes a fraction of a second.
const char* kQuick = R"({
  "iterations": 5, "warmup": 2,
  "gp": {"hyper_budget": 30, "hyper_starts": 2},
  "ebm": {"hidden": 16, "inner": 16, "epochs": 2},
  "ppo": {"hidden": 16},
  "acquisition": {"candidates": 64}
})";

RunTrace golden_trace() {
    RunTrace t;
    t.config.benchmark = "branin";
    t.config.method = Method::rebmbo_c;
    t.config.seed = 7;
    t.config = t.config.resolved();
    t.run_id = make_run_id(t.config);
    t.benchmark = benchmarks::lookup("branin");
    IterationRecord a;
    a.t = 1;
    a.x = Vector{{1.5, 2.25}};
    a.y = -3.5;
    a.best_y = -3.5;
    a.energy_raw = 0.125;
    a.energy_norm = 0.5;
    a.energy_opt = -0.25;
    a.reward = -1.0 / 3.0;
    a.regret_inst = 3.1;
    a.regret_simple = 3.1;
    a.lar = 2.9875;
    a.wall_ms = 12.34567;
    IterationRecord b;
    b.t = 2;
    b.x = Vector{{-5.0, 15.0}};
    b.y = -300.0;
    b.best_y = -3.5;
    b.regret_inst = 299.6;
    b.regret_simple = 3.1;
    b.wall_ms = 0.5;
    t.records = {a, b};
    return t;
}

int cli(const std::string& args) {
    const std::string cmd = std::string(REBMBO_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("empty config resolves to the defaults") {
    for (const char* text : {"", "  \n", "{}"}) {
        const auto f = ex::parse_config_text(text);
        CHECK(f.base.ppo.lambda == 0.35);
        CHECK(f.base.ppo.learning_rate == 3e-4);
        CHECK(f.base.ppo.clip == 0.2);
        CHECK(f.base.ppo.discount == 0.99);
        CHECK(f.base.ebm.learning_rate == 1e-4);
        CHECK(f.base.ebm.langevin.steps == 20);
        CHECK(f.base.ebm.langevin.step_size == 0.01);
        CHECK(f.base.ebm.langevin.temperature == 0.1);
        CHECK(f.base.ebm.epochs == 30);
        CHECK(f.base.ebm.batch_size == 64);
        CHECK(f.base.acquisition.beta == 2.0);
        CHECK(f.base.acquisition.gamma == 0.1);
        CHECK(f.base.lar_alpha == 0.3);
        CHECK(f.base.warmup == 5);
        CHECK(f.methods.size() == 3);
        CHECK(f.seeds.size() == 5);
    }
}

TEST_CASE("schema violations name the key") {
    auto expect_path = [](const std::string& text, const std::string& path) {
        try {
            ex::parse_config_text(text);
            FAIL("accepted: " << text);
        } catch (const ex::ConfigError& e) {
            CHECK(e.path == path);
            CHECK(std::string(e.what()).find(path) != std::string::npos);
        }
    };
    expect_path(R"({"foo": 1})", "foo");
    expect_path(R"({"ebm": {"langevin": {"stepz": 3}}})", "ebm.langevin.stepz");
    expect_path(R"({"iterations": "ten"})", "iterations");
    expect_path(R"({"iterations": 2.5})", "iterations");
    expect_path(R"({"ppo": {"lambda": true}})", "ppo.lambda");
    expect_path(R"({"ebm": 3})", "ebm");
    expect_path(R"({"methods": ["rebmbo-x"]})", "methods[0]");
    expect_path(R"({"seeds": [-1]})", "seeds[0]");
    expect_path(R"({"benchmark": {"name": "levy"}})", "benchmark");
    expect_path(R"({"benchmark": {"name": "branin", "dim": 3}})", "benchmark");
    CHECK_THROWS_AS(ex::parse_config_text("{not json"), ex::ConfigError);
    CHECK_THROWS_AS(ex::parse_config_text(R"({"warmup": 40})"), ex::ConfigError);
    CHECK_THROWS_AS(ex::parse_config("/nonexistent/rebmbo.json"), ex::IoError);
    // Integers are accepted where floats are expected.
    CHECK(ex::parse_config_text(R"({"ppo": {"lambda": 1}})").base.ppo.lambda == 1.0);
}

TEST_CASE("config round trip") {
    auto f = ex::parse_config_text(R"({"benchmark": {"name": "ackley", "dim": 3}, "seed": 9, "gp": {"deep": {"epochs": 7}}})");
    const auto j = ex::experiment_to_json(f);
    const auto g = ex::experiment_from_json(j);
    CHECK(ex::experiment_to_json(g) == j);
    CHECK(g.base.gp.deep.epochs == 7);
    CHECK(g.base.benchmark == "ackley");
    CHECK(ex::config_from_json(ex::config_to_json(f.base.resolved())).initial_design == 6);
}

TEST_CASE("trace JSON round trip") {
    auto f = ex::parse_config_text(kQuick);
    for (Method m : {Method::rebmbo_c, Method::gp_ucb}) {
        auto c = f.base;
        c.method = m;
        const auto t = orchestrator::run(c);
        const auto j = ex::trace_to_json(t);
        CHECK_FALSE(ex::dump(j).find("wall_ms") != std::string::npos);
        const auto back = ex::trace_from_json(j);
        CHECK(ex::dump(ex::trace_to_json(back)) == ex::dump(j));
        CHECK(back.records.size() == t.records.size());
        CHECK(back.records[2].x == t.records[2].x);
        CHECK(back.records[2].y == t.records[2].y);
        CHECK(back.records.back().ppo.has_value() == t.records.back().ppo.has_value());
        CHECK(back.config.ebm.hidden == 16);
        CHECK(back.initial_x == t.initial_x);
        CHECK(metrics::simple_regret(back) == metrics::simple_regret(t));
    }
}

TEST_CASE("CSV layout") {
    const auto t = golden_trace();
    const std::string csv = ex::trace_csv(t);
    CHECK(csv == slurp(REBMBO_GOLDEN_CSV));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(ex::csv_columns(20).size() == 35);
    CHECK(ex::csv_columns(21).size() == 15);
    CHECK(ex::csv_columns(2).back() == "x_1");
    CHECK(ex::file_stem(t.config) == "branin_rebmbo-c_seed7");
}

TEST_CASE("written runs and csv rows") {
    const auto dir = scratch("run");
    auto f = ex::parse_config_text(kQuick);
    const auto w = ex::cmd_run(f, Method::gp_ucb, 3, dir);
    CHECK(w.json.filename() == "branin_gp-ucb_seed3.json");
    const std::string csv = slurp(w.csv);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5 + 1);
    const auto first = slurp(w.json);
    ex::cmd_run(f, Method::gp_ucb, 3, dir);
    CHECK(slurp(w.json) == first);
    CHECK(ex::load_trace(w.json).config.seed == 3);
}

TEST_CASE("sweep, manifest and report") {
    auto f = ex::parse_config_text(kQuick);
    f.methods = {Method::rebmbo_c, Method::random};
    f.seeds = {0, 1, 2};
    const auto serial = scratch("serial"), parallel = scratch("parallel");
    const auto a = ex::cmd_sweep(f, serial, 1);
    const auto b = ex::cmd_sweep(f, parallel, 4);
    CHECK(a.failures == 0);
    REQUIRE(a.entries.size() == 6);
    int traces = 0;
    for (const auto& e : fs::directory_iterator(serial)) traces += e.path().extension() == ".json";
    CHECK(traces == 6 + 1);
    for (const auto& e : ex::read_manifest(a.manifest)) {
        CHECK(e.status == "ok");
        CHECK(fs::exists(serial / e.json));
        CHECK(fs::exists(serial / e.csv));
        CHECK(slurp(serial / e.json) == slurp(parallel / e.json));
    }
    CHECK(slurp(a.manifest) == slurp(b.manifest));

    const auto r = ex::cmd_report(a.manifest, {2, 5, 99});
    CHECK(fs::exists(r.summary));
    CHECK(fs::exists(r.plot_regret));
    CHECK(fs::exists(r.plot_lar));
    CHECK(r.warnings.size() == 2);
    REQUIRE(r.summaries.size() == 2);
    std::vector<RunTrace> group;
    for (const auto& e : a.entries)
        if (e.method == "rebmbo-c") group.push_back(ex::load_trace(serial / e.json));
    const auto s = metrics::summarize(group, {2, 5, 99});
    CHECK(r.summaries[0].simple_regret[1].mean == s.simple_regret[1].mean);
    CHECK(r.summaries[0].simple_regret[1].std == s.simple_regret[1].std);
    CHECK(r.summaries[0].lar.has_value());
    CHECK_FALSE(r.summaries[1].lar.has_value());
    const std::string plot = slurp(r.plot_regret);
    CHECK(plot.rfind("method,t,mean,std\n", 0) == 0);
    CHECK(std::count(plot.begin(), plot.end(), '\n') == 1 + 2 * 5);
    CHECK(slurp(r.summary).rfind("method,benchmark,dim,metric,t,mean,std,n\n", 0) == 0);

    f.seeds = {4};
    const auto one = scratch("single");
    const auto single = ex::cmd_sweep(f, one, 2);
    const auto rs = ex::cmd_report(single.manifest, {});
    for (const auto& sm : rs.summaries)
        for (const auto& c : sm.simple_regret) CHECK(c.std == 0.0);
    std::istringstream lines(slurp(rs.plot_regret));
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) CHECK(line.substr(line.rfind(',') + 1) == "0");
}

TEST_CASE("failed runs are recorded") {
    auto f = ex::parse_config_text(kQuick);
    f.methods = {Method::rebmbo_d, Method::random};
    f.seeds = {0};
    f.base.gp.deep.learning_rate = 1e6;  // diverges on the first fit
    const auto dir = scratch("fail");
    const auto res = ex::cmd_sweep(f, dir, 2);
    CHECK(res.failures == 1);
    const auto entries = ex::read_manifest(res.manifest);
    CHECK(entries[0].status == "failed");
    CHECK(entries[0].json == "branin_rebmbo-d_seed0.partial.json");
    CHECK(fs::exists(dir / entries[0].json));
    CHECK(ex::load_trace(dir / entries[0].json).status == "failed");
    CHECK(entries[1].status == "ok");
    // The report skips the failed run.
    CHECK(ex::cmd_report(res.manifest, {}).summaries.size() == 1);
    CHECK_THROWS_AS(ex::cmd_report(scratch("empty") / "manifest.json", {}), ex::IoError);
    CHECK_THROWS_AS(ex::cmd_run(f, Method::rebmbo_d, 0, dir), orchestrator::RunFailure);
}

TEST_CASE("checkpoint parsing") {
    CHECK(ex::parse_checkpoints("10,20,30") == std::vector<int>{10, 20, 30});
    CHECK(ex::parse_checkpoints("").empty());
    CHECK_THROWS_AS(ex::parse_checkpoints("10,x"), ex::ConfigError);
    CHECK_THROWS_AS(ex::parse_checkpoints("0"), ex::ConfigError);
}

TEST_CASE("command line exit codes") {
    const auto dir = scratch("cli");
    {
        std::ofstream(dir / "quick.json") << kQuick;
        std::ofstream(dir / "bad.json") << R"({"foo": 1})";
        std::ofstream(dir / "sweep.json") << R"({"iterations": 3, "warmup": 1, "methods": ["random", "gp-ucb"],
                                                "seeds": [0, 1], "acquisition": {"candidates": 32},
                                                "gp": {"hyper_budget": 10}})";
        std::ofstream(dir / "diverge.json") << R"({"iterations": 2, "warmup": 1, "methods": ["rebmbo-d", "random"],
                                                  "seeds": [0], "gp": {"deep": {"learning_rate": 1e6}}})";
    }
    const std::string d = dir.string();
    CHECK(cli("run --config " + d + "/quick.json --method gp-ucb --seed 1 --out " + d + "/out") == 0);
    CHECK(fs::exists(dir / "out" / "branin_gp-ucb_seed1.json"));
    CHECK(cli("run --config " + d + "/bad.json --out " + d + "/out") == 1);
    CHECK(cli("run --config " + d + "/missing.json") == 1);
    CHECK(cli("run --config " + d + "/quick.json --method nope") == 1);
    CHECK(cli("frobnicate") == 1);
    CHECK(cli("sweep --config " + d + "/sweep.json --out " + d + "/sw") == 0);
    CHECK(cli("report --manifest " + d + "/sw/manifest.json --checkpoints 1,3") == 0);
    CHECK(fs::exists(dir / "sw" / "summary.csv"));
    CHECK(cli("report --manifest " + d + "/nowhere/manifest.json") == 2);
    CHECK(cli("sweep --config " + d + "/diverge.json --out " + d + "/dv") == 3);
    CHECK(cli("run --config " + d + "/diverge.json --method rebmbo-d --out " + d + "/dv") == 2);
    CHECK(cli("report --manifest " + d + "/sw/manifest.json --checkpoints 0") == 1);
}
