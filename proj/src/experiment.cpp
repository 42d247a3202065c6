#include "rebmbo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "rebmbo/orchestrator.hpp"

namespace rebmbo::experiment {

namespace fs = std::filesystem;

ConfigError::ConfigError(const std::string& key_path, const std::string& message)
    : Error(key_path.empty() ? message : key_path + ": " + message), path(key_path) {}

namespace {

// ---- config schema -------------------------------------------------------

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

bool is_integer(const Json& j) { return j.is_number_integer() || j.is_number_unsigned(); }

// Checks `user` against the shape of `defaults` and returns defaults with
// user values patched in.
Json merge_checked(const Json& defaults, const Json& user, const std::string& prefix) {
    if (!user.is_object()) throw ConfigError(prefix, "expected an object");
    Json out = defaults;
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string path = join(prefix, it.key());
        if (!defaults.contains(it.key())) throw ConfigError(path, "unknown key");
        const Json& def = defaults.at(it.key());
        const Json& val = it.value();
        if (def.is_object()) {
            out[it.key()] = merge_checked(def, val, path);
            continue;
        }
        bool ok = false;
        std::string expected;
        if (def.is_boolean()) {
            ok = val.is_boolean();
            expected = "a boolean";
        } else if (def.is_number_float()) {
            ok = val.is_number();
            expected = "a number";
        } else if (is_integer(def)) {
            ok = is_integer(val);
            expected = "an integer";
        } else if (def.is_string()) {
            ok = val.is_string();
            expected = "a string";
        } else if (def.is_array()) {
            ok = val.is_array();
            expected = "an array";
        }
        if (!ok) throw ConfigError(path, "expected " + expected);
        out[it.key()] = val;
    }
    return out;
}

template <typename T>
T get_int(const Json& obj, const std::string& key, const std::string& prefix) {
    const Json& v = obj.at(key);
    if (!is_integer(v)) throw ConfigError(join(prefix, key), "expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && v.get<std::int64_t>() < 0) {
            throw ConfigError(join(prefix, key), "expected a nonnegative integer");
        }
    }
    return v.get<T>();
}

template <typename T>
void read_int(const Json& obj, const std::string& key, const std::string& prefix, T& out) {
    out = get_int<T>(obj, key, prefix);
}

void read_num(const Json& obj, const char* key, double& out) { out = obj.at(key).get<double>(); }

Json gp_json(const GpSettings& g) {
    return {{"amplitude", g.amplitude},
            {"lengthscale", g.lengthscale},
            {"w_rbf", g.w_rbf},
            {"w_matern", g.w_matern},
            {"noise", g.noise},
            {"hyper_budget", g.hyper_budget},
            {"hyper_starts", g.hyper_starts},
            {"refit_threshold", g.refit_threshold},
            {"refit_every", g.refit_every},
            {"sparse_inducing", g.sparse_inducing},
            {"deep",
             {{"feature_dim", g.deep.feature_dim},
              {"hidden", g.deep.hidden},
              {"beta", g.deep.beta},
              {"prior_precision", g.deep.prior_precision},
              {"epochs", g.deep.epochs},
              {"learning_rate", g.deep.learning_rate}}}};
}

Json ebm_json(const ebm::EbmConfig& e) {
    return {{"hidden", e.hidden},
            {"inner", e.inner},
            {"blocks", e.blocks},
            {"learning_rate", e.learning_rate},
            {"epochs", e.epochs},
            {"batch_size", e.batch_size},
            {"langevin",
             {{"steps", e.langevin.steps},
              {"step_size", e.langevin.step_size},
              {"temperature", e.langevin.temperature}}}};
}

Json acquisition_json(const acquisition::AcquisitionConfig& a) {
    return {{"beta", a.beta},
            {"gamma", a.gamma},
            {"candidates", a.n_candidates},
            {"refine_steps", a.n_refine_steps},
            {"refine_step_size", a.refine_step_size},
            {"top_k", a.top_k}};
}

Json ppo_json(const agent::PpoConfig& p) {
    return {{"hidden", p.hidden},
            {"learning_rate", p.learning_rate},
            {"clip", p.clip},
            {"discount", p.discount},
            {"value_coef", p.value_coef},
            {"entropy_coef", p.entropy_coef},
            {"epochs", p.epochs},
            {"minibatch", p.minibatch},
            {"max_grad_norm", p.max_grad_norm},
            {"init_log_std", p.init_log_std},
            {"lambda", p.lambda},
            {"probes", p.probes},
            {"refresh_old", p.refresh_old}};
}

// Reads every RunConfig field from an already shape-checked document.
RunConfig read_config(const Json& j) {
    RunConfig c;
    const Json& b = j.at("benchmark");
    c.benchmark = b.at("name").get<std::string>();
    read_int(b, "dim", "benchmark", c.dim);
    try {
        c.method = parse_method(j.at("method").get<std::string>());
    } catch (const LookupError& e) {
        throw ConfigError("method", e.what());
    }
    read_int(j, "seed", "", c.seed);
    read_int(j, "iterations", "", c.iterations);
    read_int(j, "initial_design", "", c.initial_design);
    read_int(j, "warmup", "", c.warmup);
    c.always_acquisition = j.at("always_acquisition").get<bool>();
    read_num(j, "lar_alpha", c.lar_alpha);

    const Json& g = j.at("gp");
    read_num(g, "amplitude", c.gp.amplitude);
    read_num(g, "lengthscale", c.gp.lengthscale);
    read_num(g, "w_rbf", c.gp.w_rbf);
    read_num(g, "w_matern", c.gp.w_matern);
    read_num(g, "noise", c.gp.noise);
    read_int(g, "hyper_budget", "gp", c.gp.hyper_budget);
    read_int(g, "hyper_starts", "gp", c.gp.hyper_starts);
    read_int(g, "refit_threshold", "gp", c.gp.refit_threshold);
    read_int(g, "refit_every", "gp", c.gp.refit_every);
    read_int(g, "sparse_inducing", "gp", c.gp.sparse_inducing);
    const Json& d = g.at("deep");
    read_int(d, "feature_dim", "gp.deep", c.gp.deep.feature_dim);
    read_int(d, "hidden", "gp.deep", c.gp.deep.hidden);
    read_num(d, "beta", c.gp.deep.beta);
    read_num(d, "prior_precision", c.gp.deep.prior_precision);
    read_int(d, "epochs", "gp.deep", c.gp.deep.epochs);
    read_num(d, "learning_rate", c.gp.deep.learning_rate);

    const Json& e = j.at("ebm");
    read_int(e, "hidden", "ebm", c.ebm.hidden);
    read_int(e, "inner", "ebm", c.ebm.inner);
    read_int(e, "blocks", "ebm", c.ebm.blocks);
    read_num(e, "learning_rate", c.ebm.learning_rate);
    read_int(e, "epochs", "ebm", c.ebm.epochs);
    read_int(e, "batch_size", "ebm", c.ebm.batch_size);
    const Json& l = e.at("langevin");
    read_int(l, "steps", "ebm.langevin", c.ebm.langevin.steps);
    read_num(l, "step_size", c.ebm.langevin.step_size);
    read_num(l, "temperature", c.ebm.langevin.temperature);

    const Json& a = j.at("acquisition");
    read_num(a, "beta", c.acquisition.beta);
    read_num(a, "gamma", c.acquisition.gamma);
    read_int(a, "candidates", "acquisition", c.acquisition.n_candidates);
    read_int(a, "refine_steps", "acquisition", c.acquisition.n_refine_steps);
    read_num(a, "refine_step_size", c.acquisition.refine_step_size);
    read_int(a, "top_k", "acquisition", c.acquisition.top_k);

    const Json& p = j.at("ppo");
    read_int(p, "hidden", "ppo", c.ppo.hidden);
    read_num(p, "learning_rate", c.ppo.learning_rate);
    read_num(p, "clip", c.ppo.clip);
    read_num(p, "discount", c.ppo.discount);
    read_num(p, "value_coef", c.ppo.value_coef);
    read_num(p, "entropy_coef", c.ppo.entropy_coef);
    read_int(p, "epochs", "ppo", c.ppo.epochs);
    read_int(p, "minibatch", "ppo", c.ppo.minibatch);
    read_num(p, "max_grad_norm", c.ppo.max_grad_norm);
    read_num(p, "init_log_std", c.ppo.init_log_std);
    read_num(p, "lambda", c.ppo.lambda);
    read_int(p, "probes", "ppo", c.ppo.probes);
    c.ppo.refresh_old = p.at("refresh_old").get<bool>();
    return c;
}

// ---- trace document ------------------------------------------------------

Json vec_json(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector json_vec(const Json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Json mat_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec_json(m.row(i).transpose()));
    return rows;
}

Matrix json_mat(const Json& j, Eigen::Index cols) {
    Matrix m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const Vector r = json_vec(j[i]);
        if (r.size() != cols) throw InputError("matrix row has the wrong width");
        m.row(static_cast<Eigen::Index>(i)) = r.transpose();
    }
    return m;
}

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> json_opt(const Json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

Json record_json(const IterationRecord& r) {
    Json j = {{"t", r.t},
              {"x", vec_json(r.x)},
              {"y", r.y},
              {"best_y", r.best_y},
              {"selector", r.selector},
              {"memo_hit", r.memo_hit},
              {"energy_raw", opt_json(r.energy_raw)},
              {"energy_norm", opt_json(r.energy_norm)},
              {"energy_opt", opt_json(r.energy_opt)},
              {"reward", opt_json(r.reward)},
              {"regret_inst", r.regret_inst},
              {"regret_simple", r.regret_simple},
              {"lar", opt_json(r.lar)},
              {"acquisition_score", opt_json(r.acquisition_score)},
              {"log_likelihood", opt_json(r.log_likelihood)}};
    if (r.ebm) {
        j["ebm"] = {{"mean_positive", r.ebm->mean_positive},
                    {"mean_negative", r.ebm->mean_negative},
                    {"steps", r.ebm->steps},
                    {"skipped", r.ebm->skipped},
                    {"reinitialized", r.ebm->reinitialized}};
    } else {
        j["ebm"] = nullptr;
    }
    if (r.ppo) {
        j["ppo"] = {{"actor_loss", r.ppo->actor_loss},
                    {"critic_loss", r.ppo->critic_loss},
                    {"entropy", r.ppo->entropy},
                    {"mean_ratio", r.ppo->mean_ratio},
                    {"clip_fraction", r.ppo->clip_fraction},
                    {"aborted_epochs", r.ppo->aborted_epochs},
                    {"minibatches", r.ppo->minibatches}};
    } else {
        j["ppo"] = nullptr;
    }
    return j;
}

IterationRecord json_record(const Json& j) {
    IterationRecord r;
    r.t = j.at("t").get<int>();
    r.x = json_vec(j.at("x"));
    r.y = j.at("y").get<double>();
    r.best_y = j.at("best_y").get<double>();
    r.selector = j.at("selector").get<std::string>();
    r.memo_hit = j.at("memo_hit").get<bool>();
    r.energy_raw = json_opt(j.at("energy_raw"));
    r.energy_norm = json_opt(j.at("energy_norm"));
    r.energy_opt = json_opt(j.at("energy_opt"));
    r.reward = json_opt(j.at("reward"));
    r.regret_inst = j.at("regret_inst").get<double>();
    r.regret_simple = j.at("regret_simple").get<double>();
    r.lar = json_opt(j.at("lar"));
    r.acquisition_score = json_opt(j.at("acquisition_score"));
    r.log_likelihood = json_opt(j.at("log_likelihood"));
    if (const Json& e = j.at("ebm"); !e.is_null()) {
        EbmSummary s;
        s.mean_positive = e.at("mean_positive").get<double>();
        s.mean_negative = e.at("mean_negative").get<double>();
        s.steps = e.at("steps").get<int>();
        s.skipped = e.at("skipped").get<int>();
        s.reinitialized = e.at("reinitialized").get<int>();
        r.ebm = s;
    }
    if (const Json& p = j.at("ppo"); !p.is_null()) {
        agent::UpdateDiagnostics u;
        u.actor_loss = p.at("actor_loss").get<double>();
        u.critic_loss = p.at("critic_loss").get<double>();
        u.entropy = p.at("entropy").get<double>();
        u.mean_ratio = p.at("mean_ratio").get<double>();
        u.clip_fraction = p.at("clip_fraction").get<double>();
        u.aborted_epochs = p.at("aborted_epochs").get<int>();
        u.minibatches = p.at("minibatches").get<int>();
        r.ppo = u;
    }
    return r;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("failed writing " + path.string());
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

}  // namespace

// ---- config --------------------------------------------------------------

Json config_to_json(const RunConfig& c) {
    return {{"benchmark", {{"name", c.benchmark}, {"dim", c.dim}}},
            {"method", to_string(c.method)},
            {"seed", c.seed},
            {"iterations", c.iterations},
            {"initial_design", c.initial_design},
            {"warmup", c.warmup},
            {"always_acquisition", c.always_acquisition},
            {"lar_alpha", c.lar_alpha},
            {"gp", gp_json(c.gp)},
            {"ebm", ebm_json(c.ebm)},
            {"acquisition", acquisition_json(c.acquisition)},
            {"ppo", ppo_json(c.ppo)}};
}

RunConfig config_from_json(const Json& doc) { return read_config(merge_checked(config_to_json(RunConfig{}), doc, "")); }

Json experiment_to_json(const ExperimentFile& f) {
    Json j = config_to_json(f.base);
    Json methods = Json::array();
    for (Method m : f.methods) methods.push_back(to_string(m));
    j["methods"] = methods;
    j["seeds"] = f.seeds;
    j["output_dir"] = f.output_dir;
    j["checkpoints"] = f.checkpoints;
    return j;
}

ExperimentFile experiment_from_json(const Json& doc) {
    const Json merged = merge_checked(experiment_to_json(ExperimentFile{}), doc, "");
    ExperimentFile f;
    Json run = merged;
    for (const char* k : {"methods", "seeds", "output_dir", "checkpoints"}) run.erase(k);
    f.base = read_config(run);

    f.methods.clear();
    for (std::size_t i = 0; i < merged.at("methods").size(); ++i) {
        const Json& m = merged["methods"][i];
        const std::string path = "methods[" + std::to_string(i) + "]";
        if (!m.is_string()) throw ConfigError(path, "expected a method name");
        try {
            f.methods.push_back(parse_method(m.get<std::string>()));
        } catch (const LookupError& e) {
            throw ConfigError(path, e.what());
        }
    }
    f.seeds.clear();
    for (std::size_t i = 0; i < merged.at("seeds").size(); ++i) {
        const Json& s = merged["seeds"][i];
        if (!s.is_number_unsigned()) throw ConfigError("seeds[" + std::to_string(i) + "]", "expected a nonnegative integer");
        f.seeds.push_back(s.get<std::uint64_t>());
    }
    f.output_dir = merged.at("output_dir").get<std::string>();
    f.checkpoints.clear();
    for (std::size_t i = 0; i < merged.at("checkpoints").size(); ++i) {
        const Json& c = merged["checkpoints"][i];
        if (!is_integer(c) || c.get<std::int64_t>() < 1) {
            throw ConfigError("checkpoints[" + std::to_string(i) + "]", "expected a positive integer");
        }
        f.checkpoints.push_back(c.get<int>());
    }
    if (f.methods.empty()) throw ConfigError("methods", "at least one method is required");
    if (f.seeds.empty()) throw ConfigError("seeds", "at least one seed is required");
    try {
        (void)f.base.resolved();
    } catch (const LookupError& e) {
        throw ConfigError("benchmark", e.what());
    } catch (const InputError& e) {
        throw ConfigError("benchmark", e.what());
    } catch (const ParameterError& e) {
        throw ConfigError("", e.what());
    }
    return f;
}

ExperimentFile parse_config_text(const std::string& text) {
    if (std::all_of(text.begin(), text.end(), [](unsigned char ch) { return std::isspace(ch) != 0; })) {
        return experiment_from_json(Json::object());
    }
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    return experiment_from_json(doc);
}

ExperimentFile parse_config(const fs::path& path) {
    if (!fs::exists(path)) throw IoError("config file not found: " + path.string());
    return parse_config_text(read_file(path));
}

// ---- traces --------------------------------------------------------------

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

Json trace_to_json(const RunTrace& t) {
    Json points = Json::array();
    for (const auto& p : t.benchmark.optimizer_points) points.push_back(vec_json(p));
    Json records = Json::array();
    for (const auto& r : t.records) records.push_back(record_json(r));
    return {{"run_id", t.run_id},
            {"status", t.status},
            {"error", t.error},
            {"config", config_to_json(t.config)},
            {"benchmark",
             {{"name", t.benchmark.name},
              {"dim", t.benchmark.dim},
              {"lower", vec_json(t.benchmark.box.lower())},
              {"upper", vec_json(t.benchmark.box.upper())},
              {"optimum_value", t.benchmark.optimum_value},
              {"optimizer_points", points},
              {"sign", t.benchmark.sign}}},
            {"x_star", vec_json(t.x_star)},
            {"initial_design", {{"x", mat_json(t.initial_x)}, {"y", t.initial_y}}},
            {"evaluations", t.evaluations},
            {"records", records}};
}

RunTrace trace_from_json(const Json& j) {
    try {
        RunTrace t;
        t.run_id = j.at("run_id").get<std::string>();
        t.status = j.at("status").get<std::string>();
        t.error = j.at("error").get<std::string>();
        t.config = config_from_json(j.at("config"));
        const Json& b = j.at("benchmark");
        t.benchmark.name = b.at("name").get<std::string>();
        t.benchmark.dim = b.at("dim").get<std::size_t>();
        t.benchmark.box = Box(json_vec(b.at("lower")), json_vec(b.at("upper")));
        t.benchmark.optimum_value = b.at("optimum_value").get<double>();
        for (const auto& p : b.at("optimizer_points")) t.benchmark.optimizer_points.push_back(json_vec(p));
        t.benchmark.sign = b.at("sign").get<int>();
        t.x_star = json_vec(j.at("x_star"));
        t.initial_x = json_mat(j.at("initial_design").at("x"), t.benchmark.box.dim());
        t.initial_y = j.at("initial_design").at("y").get<std::vector<double>>();
        t.evaluations = j.at("evaluations").get<int>();
        for (const auto& r : j.at("records")) t.records.push_back(json_record(r));
        return t;
    } catch (const Json::exception& e) {
        throw InputError(std::string("malformed trace document: ") + e.what());
    }
}

RunTrace load_trace(const fs::path& path) {
    try {
        return trace_from_json(Json::parse(read_file(path)));
    } catch (const Json::parse_error& e) {
        throw InputError("malformed trace " + path.string() + ": " + e.what());
    }
}

std::vector<std::string> csv_columns(Eigen::Index dim) {
    std::vector<std::string> cols = {"run_id",      "method",     "benchmark",  "dim",          "seed",
                                     "t",           "y",          "best_y",     "energy_raw",   "energy_norm",
                                     "reward",      "regret_inst", "regret_simple", "lar",      "wall_ms"};
    if (dim <= 20) {
        for (Eigen::Index i = 0; i < dim; ++i) cols.push_back("x_" + std::to_string(i));
    }
    return cols;
}

std::string trace_csv(const RunTrace& t) {
    const Eigen::Index d = t.benchmark.box.dim();
    std::ostringstream out;
    const auto cols = csv_columns(d);
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << "\n";
    const std::string method = to_string(t.config.method);
    for (const auto& r : t.records) {
        char wall[32];
        std::snprintf(wall, sizeof wall, "%.3f", r.wall_ms);
        out << t.run_id << ',' << method << ',' << t.config.benchmark << ',' << d << ',' << t.config.seed << ','
            << r.t << ',' << num(r.y) << ',' << num(r.best_y) << ',' << num(r.energy_raw) << ','
            << num(r.energy_norm) << ',' << num(r.reward) << ',' << num(r.regret_inst) << ','
            << num(r.regret_simple) << ',' << num(r.lar) << ',' << wall;
        if (d <= 20) {
            for (Eigen::Index i = 0; i < d; ++i) out << ',' << num(r.x[i]);
        }
        out << "\n";
    }
    return out.str();
}

std::string file_stem(const RunConfig& c) {
    return c.benchmark + "_" + to_string(c.method) + "_seed" + std::to_string(c.seed);
}

WrittenRun write_trace(const RunTrace& trace, const fs::path& out_dir) {
    ensure_dir(out_dir);
    const std::string stem = file_stem(trace.config) + (trace.status == "ok" ? "" : ".partial");
    WrittenRun w{out_dir / (stem + ".json"), out_dir / (stem + ".csv")};
    write_file(w.json, dump(trace_to_json(trace)));
    write_file(w.csv, trace_csv(trace));
    return w;
}

WrittenRun cmd_run(const ExperimentFile& file, Method method, std::uint64_t seed, const fs::path& out_dir) {
    RunConfig c = file.base;
    c.method = method;
    c.seed = seed;
    ensure_dir(out_dir);
    try {
        return write_trace(orchestrator::run(c), out_dir);
    } catch (const orchestrator::RunFailure& f) {
        write_trace(f.partial, out_dir);
        throw;
    }
}

// ---- sweep ---------------------------------------------------------------

int sweep_threads(std::size_t seeds) {
    if (const char* env = std::getenv("REBMBO_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
    }
    return static_cast<int>(std::max<std::size_t>(1, seeds));
}

namespace {

Json manifest_json(const std::vector<ManifestEntry>& entries, int failures) {
    Json runs = Json::array();
    for (const auto& e : entries) {
        runs.push_back({{"run_id", e.run_id},
                        {"method", e.method},
                        {"seed", e.seed},
                        {"status", e.status},
                        {"json", e.json},
                        {"csv", e.csv},
                        {"error", e.error}});
    }
    return {{"runs", runs}, {"failures", failures}};
}

}  // namespace

SweepResult cmd_sweep(const ExperimentFile& file, const fs::path& out_dir, int threads, const fs::path& manifest) {
    if (file.methods.empty() || file.seeds.empty()) throw ConfigError("", "a sweep needs at least one method and seed");
    ensure_dir(out_dir);
    struct Job {
        Method method;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (Method m : file.methods) {
        for (std::uint64_t s : file.seeds) jobs.push_back({m, s});
    }
    SweepResult result;
    result.manifest = manifest.empty() ? out_dir / "manifest.json" : manifest;
    const fs::path base = result.manifest.parent_path().empty() ? fs::path(".") : result.manifest.parent_path();
    result.entries.resize(jobs.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            RunConfig c = file.base;
            c.method = jobs[i].method;
            c.seed = jobs[i].seed;
            ManifestEntry& e = result.entries[i];
            e.run_id = make_run_id(c);
            e.method = to_string(c.method);
            e.seed = c.seed;
            try {
                std::optional<WrittenRun> w;
                try {
                    w = write_trace(orchestrator::run(c), out_dir);
                    e.status = "ok";
                } catch (const orchestrator::RunFailure& f) {
                    e.status = "failed";
                    e.error = f.what();
                    w = write_trace(f.partial, out_dir);
                }
                e.json = fs::relative(w->json, base).generic_string();
                e.csv = fs::relative(w->csv, base).generic_string();
            } catch (const std::exception& ex) {
                e.status = "failed";
                e.error = ex.what();
            }
        }
    };
    const int n_threads = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
    std::vector<std::thread> pool;
    for (int k = 1; k < n_threads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    for (const auto& e : result.entries) result.failures += e.status == "ok" ? 0 : 1;
    if (!result.manifest.parent_path().empty()) ensure_dir(result.manifest.parent_path());
    write_file(result.manifest, dump(manifest_json(result.entries, result.failures)));
    return result;
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
    Json doc;
    try {
        doc = Json::parse(read_file(path));
    } catch (const Json::parse_error& e) {
        throw InputError("malformed manifest " + path.string() + ": " + e.what());
    }
    std::vector<ManifestEntry> out;
    try {
        for (const auto& r : doc.at("runs")) {
            ManifestEntry e;
            e.run_id = r.at("run_id").get<std::string>();
            e.method = r.at("method").get<std::string>();
            e.seed = r.at("seed").get<std::uint64_t>();
            e.status = r.at("status").get<std::string>();
            e.json = r.at("json").get<std::string>();
            e.csv = r.at("csv").get<std::string>();
            e.error = r.at("error").get<std::string>();
            out.push_back(std::move(e));
        }
    } catch (const Json::exception& e) {
        throw InputError("malformed manifest " + path.string() + ": " + e.what());
    }
    return out;
}

// ---- report --------------------------------------------------------------

ReportResult cmd_report(const fs::path& manifest, const std::vector<int>& checkpoints, const fs::path& out_dir) {
    const auto entries = read_manifest(manifest);
    const fs::path base = manifest.parent_path().empty() ? fs::path(".") : manifest.parent_path();
    // Group by (benchmark, method) in first-seen order.
    std::vector<std::string> order;
    std::map<std::string, std::vector<RunTrace>> groups;
    for (const auto& e : entries) {
        if (e.status != "ok" || e.json.empty()) continue;
        RunTrace t = load_trace(base / e.json);
        const std::string key = t.config.benchmark + "/" + to_string(t.config.method);
        if (!groups.count(key)) order.push_back(key);
        groups[key].push_back(std::move(t));
    }
    if (order.empty()) throw InputError("manifest " + manifest.string() + " lists no completed runs");

    ReportResult res;
    const fs::path dir = out_dir.empty() ? base : out_dir;
    ensure_dir(dir);
    std::ostringstream summary, regret, lar;
    summary << "method,benchmark,dim,metric,t,mean,std,n\n";
    regret << "method,t,mean,std\n";
    lar << "method,t,mean,std\n";
    for (const auto& key : order) {
        const auto& traces = groups[key];
        const int T = static_cast<int>(traces.front().records.size());
        const double alpha = traces.front().config.lar_alpha;
        metrics::Summary s = metrics::summarize(traces, checkpoints.empty() ? std::vector<int>{T} : checkpoints, alpha);
        for (const auto& w : s.warnings) res.warnings.push_back(s.method + ": " + w);
        const auto emit = [&](const char* metric, const std::vector<metrics::CheckpointStat>& stats) {
            for (const auto& c : stats) {
                summary << s.method << ',' << s.benchmark << ',' << s.dim << ',' << metric << ',' << c.t << ','
                        << num(c.mean) << ',' << num(c.std) << ',' << c.count << "\n";
            }
        };
        emit("simple_regret", s.simple_regret);
        if (s.lar) emit("lar", *s.lar);

        std::vector<int> all(static_cast<std::size_t>(T));
        for (int t = 1; t <= T; ++t) all[static_cast<std::size_t>(t - 1)] = t;
        const metrics::Summary curve = metrics::summarize(traces, all, alpha);
        for (const auto& c : curve.simple_regret) regret << s.method << ',' << c.t << ',' << num(c.mean) << ',' << num(c.std) << "\n";
        if (curve.lar) {
            for (const auto& c : *curve.lar) lar << s.method << ',' << c.t << ',' << num(c.mean) << ',' << num(c.std) << "\n";
        }
        res.summaries.push_back(std::move(s));
    }
    res.summary = dir / "summary.csv";
    res.plot_regret = dir / "plot_regret.csv";
    res.plot_lar = dir / "plot_lar.csv";
    write_file(res.summary, summary.str());
    write_file(res.plot_regret, regret.str());
    write_file(res.plot_lar, lar.str());
    return res;
}

std::vector<int> parse_checkpoints(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || v < 1) throw ConfigError("checkpoints", "expected positive integers, got '" + item + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace rebmbo::experiment
