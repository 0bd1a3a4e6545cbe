// sensorcast command-line front end. Talks to the library through the C API only.

#include <sensorcast/sensorcast.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ApiError : std::runtime_error {
    sc_status status;
    ApiError(sc_status s, const std::string& what) : std::runtime_error(what), status(s) {}
};

void check(sc_status s, const std::string& context) {
    if (s != SC_OK) {
        throw ApiError(s, context + ": " + sc_last_error());
    }
}

struct SeriesDeleter {
    void operator()(sc_series* s) const { sc_series_free(s); }
};
struct TraceDeleter {
    void operator()(sc_dps_trace* t) const { sc_dps_trace_free(t); }
};
struct EvalDeleter {
    void operator()(sc_evaluation* e) const { sc_evaluation_free(e); }
};
using SeriesPtr = std::unique_ptr<sc_series, SeriesDeleter>;
using TracePtr = std::unique_ptr<sc_dps_trace, TraceDeleter>;
using EvalPtr = std::unique_ptr<sc_evaluation, EvalDeleter>;

std::string hash_hex(const std::string& text) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(sc_fnv1a64(text.data(), text.size())));
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text) || !out.flush()) {
        throw ApiError(SC_ERR_IO, "cannot write " + path.string());
    }
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw ApiError(SC_ERR_IO, "cannot create output directory " + dir.string());
    }
}

/// Records the resolved manifest next to the outputs and returns its hash.
/// The hash covers the canonical (sorted, compact) form so key order in the
/// input file does not matter.
std::string write_manifest(const fs::path& dir, json manifest) {
    manifest["tool_version"] = sc_version();
    const std::string hash = hash_hex(manifest.dump());
    json doc = {{"manifest_hash", hash}, {"manifest", manifest}};
    write_text(dir / "manifest.json", doc.dump(2) + "\n");
    return hash;
}

json read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open manifest " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError("manifest " + path + " is not valid JSON: " + e.what());
    }
}

sc_family family_of(const std::string& name) {
    sc_family f{};
    if (sc_family_from_name(name.c_str(), &f) != SC_OK) {
        throw UsageError(sc_last_error());
    }
    return f;
}

sc_method method_of(const std::string& name) {
    sc_method m{};
    if (sc_method_from_name(name.c_str(), &m) != SC_OK) {
        throw UsageError(sc_last_error());
    }
    return m;
}

// ---- datasets ---------------------------------------------------------------

struct DatasetSpec {
    std::string family;
    int group = 1;
    std::string path; // empty: generate (Ball only)
    std::optional<double> delta;
    std::optional<std::string> sensor_id;
};

json to_json(const DatasetSpec& d) {
    json j = {{"family", d.family}, {"group", d.group}, {"path", d.path}};
    j["delta"] = d.delta ? json(*d.delta) : json(nullptr);
    j["sensor_id"] = d.sensor_id ? json(*d.sensor_id) : json(nullptr);
    return j;
}

DatasetSpec dataset_from_json(const json& j) {
    if (!j.is_object() || !j.contains("family")) {
        throw UsageError("each dataset needs at least a \"family\"");
    }
    DatasetSpec d;
    d.family = j.at("family").get<std::string>();
    d.group = j.value("group", 1);
    d.path = j.value("path", std::string());
    if (j.contains("delta") && !j["delta"].is_null()) {
        d.delta = j["delta"].get<double>();
    }
    if (j.contains("sensor_id") && !j["sensor_id"].is_null()) {
        d.sensor_id = j["sensor_id"].get<std::string>();
    }
    return d;
}

/// Fills omitted fields so the manifest hash does not depend on them, and
/// rejects unknown families before any work starts.
json normalise_datasets(const json& list) {
    if (!list.is_array()) {
        throw UsageError("\"datasets\" must be a list");
    }
    json out = json::array();
    for (const auto& entry : list) {
        const DatasetSpec d = dataset_from_json(entry);
        family_of(d.family);
        out.push_back(to_json(d));
    }
    return out;
}

double resolved_delta(const DatasetSpec& d) {
    if (d.delta) {
        return *d.delta;
    }
    double delta = 0.0;
    check(sc_builtin_threshold(family_of(d.family), &delta), "builtin threshold");
    return delta;
}

sc_dataset_desc descriptor_for(const DatasetSpec& d, std::uint64_t seed) {
    sc_dataset_desc desc{};
    desc.family = family_of(d.family);
    desc.group = d.group;
    desc.delta_min = resolved_delta(d);
    desc.expected_period = 0.0;
    desc.sensor_id = d.sensor_id ? d.sensor_id->c_str() : nullptr;
    desc.noise_seed = seed;
    desc.noise_all_values = 0;
    return desc;
}

std::string describe(const DatasetSpec& d) {
    std::string s = d.family + " group " + std::to_string(d.group);
    if (!d.path.empty()) {
        s += " (" + d.path + ")";
    }
    if (d.sensor_id) {
        s += " sensor " + *d.sensor_id;
    }
    return s;
}

SeriesPtr load_dataset(const DatasetSpec& d, std::uint64_t seed) {
    sc_series* raw = nullptr;
    if (d.path.empty()) {
        if (d.family != "ball") {
            throw ApiError(SC_ERR_DATA, "dataset " + describe(d) + " has no path; only ball can be generated");
        }
        sc_ball_params p{};
        check(sc_ball_standard_params(d.group, seed, &p), "dataset " + describe(d));
        check(sc_series_generate_ball(&p, &raw), "dataset " + describe(d));
        return SeriesPtr(raw);
    }
    const sc_dataset_desc desc = descriptor_for(d, seed);
    const sc_status s = sc_series_load_csv(d.path.c_str(), &desc, &raw);
    if (s != SC_OK) {
        throw ApiError(s == SC_ERR_INVALID_ARGUMENT ? SC_ERR_DATA : s,
                       "dataset " + describe(d) + ": " + sc_last_error());
    }
    return SeriesPtr(raw);
}

/// Dataset flags shared by evaluate, dps and calibrate.
struct DatasetFlags {
    std::string family;
    int group = 1;
    std::string path;
    double delta = 0.0;
    std::string sensor;

    void add_to(CLI::App* app) {
        app->add_option("--family", family, "Dataset family (intel, sensorscope, ball, running_latitude, running_longitude)");
        app->add_option("--group", group, "Dataset group number")->check(CLI::PositiveNumber);
        app->add_option("--data", path, "CSV file; omit to generate a Ball series");
        app->add_option("--delta", delta, "Acceptance threshold; defaults to the family's builtin")
            ->check(CLI::PositiveNumber);
        app->add_option("--sensor", sensor, "Sensor id for multi-sensor files");
    }

    bool given() const { return !family.empty(); }

    DatasetSpec spec() const {
        DatasetSpec d;
        d.family = family;
        d.group = group;
        d.path = path;
        if (delta > 0.0) {
            d.delta = delta;
        }
        if (!sensor.empty()) {
            d.sensor_id = sensor;
        }
        return d;
    }
};

sc_fit_config fit_config(sc_method method, int budget) {
    sc_fit_config c{};
    sc_fit_config_default(method, &c);
    c.optimizer_budget = budget;
    return c;
}

// ---- generate ---------------------------------------------------------------

struct GenerateOptions {
    bool standard = false;
    double theta0 = 50.0;
    double lambda = 0.1;
    double gamma = 0.05;
    double dt = 1.0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    bool no_noise = false;
    std::string out = ".";
};

int cmd_generate(const GenerateOptions& o) {
    const fs::path dir = o.out;
    ensure_dir(dir);
    std::vector<std::pair<std::string, sc_ball_params>> jobs;
    if (o.standard) {
        for (int g = 1; g <= 3; ++g) {
            sc_ball_params p{};
            check(sc_ball_standard_params(g, o.seed, &p), "standard Ball parameters");
            jobs.emplace_back("ball_" + std::to_string(g) + ".csv", p);
        }
    } else {
        jobs.emplace_back("ball.csv", sc_ball_params{o.theta0, o.lambda, o.gamma, 2800, o.dt, o.seed, 0});
    }

    json manifest = {{"command", "generate"}, {"seed", o.seed}, {"files", json::array()}};
    for (auto& [name, p] : jobs) {
        if (o.n > 0) {
            p.n = o.n;
        }
        p.suppress_noise = o.no_noise ? 1 : 0;
        manifest["files"].push_back({{"file", name},
                                     {"theta0", p.theta0},
                                     {"lambda", p.lambda},
                                     {"gamma", p.gamma},
                                     {"n", p.n},
                                     {"dt", p.dt},
                                     {"seed", p.seed},
                                     {"noise", !o.no_noise}});
    }
    for (const auto& [name, p] : jobs) {
        sc_series* raw = nullptr;
        check(sc_series_generate_ball(&p, &raw), "generate");
        SeriesPtr s(raw);
        check(sc_series_write_ball_csv(s.get(), (dir / name).string().c_str()), "write " + name);
        std::cout << (dir / name).string() << "  " << p.n << " rows\n";
    }
    const auto hash = write_manifest(dir, manifest);
    std::cout << "manifest " << hash << "\n";
    return kExitOk;
}

// ---- evaluate ---------------------------------------------------------------

struct EvaluateOptions {
    std::string manifest_path;
    DatasetFlags dataset;
    std::vector<std::string> methods;
    std::vector<std::size_t> history;
    std::vector<std::size_t> window;
    std::optional<std::size_t> splits;
    std::optional<std::uint64_t> seed;
    std::optional<int> budget;
    std::optional<unsigned> workers;
    std::string out;
};

/// Resolved evaluate configuration: built-in defaults, then the manifest
/// file, then command-line flags.
json resolve_evaluate(const EvaluateOptions& o) {
    json m = {
        {"command", "evaluate"},
        {"seed", 0},
        {"n_splits", 200},
        {"optimizer_budget", 10},
        {"methods", {"constant", "linear", "simple_mean", "es", "arima"}},
        {"history", {5, 10, 20, 50, 100, 200, 500, 1000}},
        {"window", {1, 5, 10, 20, 50, 100, 200, 500, 1000}},
        {"datasets", json::array()},
        {"output_dir", "."},
    };
    if (!o.manifest_path.empty()) {
        const json file = read_manifest(o.manifest_path);
        if (!file.is_object()) {
            throw UsageError("manifest must be a JSON object");
        }
        for (const auto& [key, value] : file.items()) {
            if (key == "workers" || key == "manifest_hash" || key == "tool_version") {
                continue;
            }
            if (!m.contains(key)) {
                throw UsageError("unknown manifest key \"" + key + "\"");
            }
            m[key] = value;
        }
    }
    if (o.dataset.given()) {
        m["datasets"] = json::array({to_json(o.dataset.spec())});
    }
    if (!o.methods.empty()) {
        m["methods"] = o.methods;
    }
    if (!o.history.empty()) {
        m["history"] = o.history;
    }
    if (!o.window.empty()) {
        m["window"] = o.window;
    }
    if (o.splits) {
        m["n_splits"] = *o.splits;
    }
    if (o.seed) {
        m["seed"] = *o.seed;
    }
    if (o.budget) {
        m["optimizer_budget"] = *o.budget;
    }
    if (!o.out.empty()) {
        m["output_dir"] = o.out;
    }
    if (m["datasets"].empty()) {
        throw UsageError("no datasets: pass --family/--data or list them in the manifest");
    }
    m["datasets"] = normalise_datasets(m["datasets"]);
    for (const auto& name : m["methods"]) {
        method_of(name.get<std::string>());
    }
    return m;
}

unsigned default_workers() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

int cmd_evaluate(const EvaluateOptions& o) {
    json m;
    try {
        m = resolve_evaluate(o);
    } catch (const json::exception& e) {
        throw UsageError(std::string("manifest: ") + e.what());
    }
    const fs::path dir = m["output_dir"].get<std::string>();
    const auto seed = m["seed"].get<std::uint64_t>();
    const auto n_splits = m["n_splits"].get<std::size_t>();
    const int budget = m["optimizer_budget"].get<int>();
    const unsigned workers = o.workers.value_or(default_workers());

    EvalPtr ev;
    {
        sc_evaluation* raw = nullptr;
        check(sc_evaluation_create(&raw), "evaluation");
        ev.reset(raw);
    }
    std::vector<SeriesPtr> loaded;
    json skipped = json::array();
    for (const auto& dj : m["datasets"]) {
        const DatasetSpec d = dataset_from_json(dj);
        loaded.push_back(load_dataset(d, seed));
        const sc_series* s = loaded.back().get();
        const std::size_t len = sc_series_length(s);
        const sc_dataset_desc desc = descriptor_for(d, seed);
        for (const auto& h : m["history"]) {
            for (const auto& w : m["window"]) {
                const auto H = h.get<std::size_t>();
                const auto W = w.get<std::size_t>();
                if (H + W > len) {
                    skipped.push_back({{"dataset", describe(d)}, {"H", H}, {"W", W}});
                    continue;
                }
                for (const auto& name : m["methods"]) {
                    const auto cfg = fit_config(method_of(name.get<std::string>()), budget);
                    check(sc_evaluation_add(ev.get(), s, &desc, &cfg, H, W, n_splits, seed),
                          "scenario " + describe(d));
                }
            }
        }
    }
    for (const auto& s : skipped) {
        std::cerr << "skipping " << s["dataset"].get<std::string>() << " H=" << s["H"] << " W=" << s["W"]
                  << ": series too short\n";
    }
    check(sc_evaluation_run(ev.get(), workers), "evaluate");

    ensure_dir(dir);
    const std::string hash = write_manifest(dir, m);
    json recorded = m;
    recorded["tool_version"] = sc_version();
    check(sc_evaluation_write(ev.get(), (dir / "report.json").string().c_str(),
                              (dir / "report.csv").string().c_str(), hash.c_str(),
                              recorded.dump().c_str()),
          "write report");
    std::cout << sc_evaluation_row_count(ev.get()) << " rows -> " << (dir / "report.csv").string()
              << "\nmanifest " << hash << "\n";
    return kExitOk;
}

// ---- dps --------------------------------------------------------------------

struct DpsOptions {
    std::string manifest_path;
    DatasetFlags dataset;
    std::vector<std::string> methods;
    std::optional<std::size_t> history;
    std::optional<std::size_t> window;
    std::optional<std::uint64_t> seed;
    std::optional<int> budget;
    std::optional<std::uint64_t> ring_c;
    std::optional<std::uint64_t> ring_d;
    std::string out;
};

json resolve_dps(const DpsOptions& o) {
    json m = {
        {"command", "dps"},
        {"seed", 0},
        {"history", 100},
        {"window", 20},
        {"optimizer_budget", 10},
        {"methods", {"arima"}},
        {"datasets", json::array()},
        {"ring", {{"C", 5}, {"D", 3}}},
        {"output_dir", "."},
    };
    if (!o.manifest_path.empty()) {
        const json file = read_manifest(o.manifest_path);
        if (!file.is_object()) {
            throw UsageError("manifest must be a JSON object");
        }
        for (const auto& [key, value] : file.items()) {
            if (key == "manifest_hash" || key == "tool_version") {
                continue;
            }
            if (!m.contains(key)) {
                throw UsageError("unknown manifest key \"" + key + "\"");
            }
            m[key] = value;
        }
    }
    if (o.dataset.given()) {
        m["datasets"] = json::array({to_json(o.dataset.spec())});
    }
    if (!o.methods.empty()) {
        m["methods"] = o.methods;
    }
    if (o.history) {
        m["history"] = *o.history;
    }
    if (o.window) {
        m["window"] = *o.window;
    }
    if (o.seed) {
        m["seed"] = *o.seed;
    }
    if (o.budget) {
        m["optimizer_budget"] = *o.budget;
    }
    if (o.ring_c) {
        m["ring"]["C"] = *o.ring_c;
    }
    if (o.ring_d) {
        m["ring"]["D"] = *o.ring_d;
    }
    if (!o.out.empty()) {
        m["output_dir"] = o.out;
    }
    if (m["datasets"].empty()) {
        throw UsageError("no datasets: pass --family/--data or list them in the manifest");
    }
    m["datasets"] = normalise_datasets(m["datasets"]);
    for (const auto& name : m["methods"]) {
        method_of(name.get<std::string>());
    }
    return m;
}

int cmd_dps(const DpsOptions& o) {
    json m;
    try {
        m = resolve_dps(o);
    } catch (const json::exception& e) {
        throw UsageError(std::string("manifest: ") + e.what());
    }
    const fs::path dir = m["output_dir"].get<std::string>();
    const auto seed = m["seed"].get<std::uint64_t>();
    const auto H = m["history"].get<std::size_t>();
    const auto W = m["window"].get<std::size_t>();
    const int budget = m["optimizer_budget"].get<int>();
    const auto C = m["ring"]["C"].get<std::uint64_t>();
    const auto D = m["ring"]["D"].get<std::uint64_t>();

    std::uint64_t ring_total = 0;
    std::uint64_t ring_nodes = 0;
    if (sc_ring_total_transmissions(C, D, &ring_total) != SC_OK ||
        sc_ring_total_nodes(C, D, &ring_nodes) != SC_OK) {
        throw UsageError(std::string("ring: ") + sc_last_error());
    }

    ensure_dir(dir);
    const std::string hash = write_manifest(dir, m);
    json summary = {{"manifest_hash", hash},
                    {"ring", {{"C", C}, {"D", D}, {"nodes", ring_nodes}, {"transmissions", ring_total}}},
                    {"runs", json::array()}};

    for (const auto& dj : m["datasets"]) {
        const DatasetSpec d = dataset_from_json(dj);
        const SeriesPtr series = load_dataset(d, seed);
        const double delta = resolved_delta(d);
        for (const auto& name : m["methods"]) {
            const std::string method = name.get<std::string>();
            const auto cfg = fit_config(method_of(method), budget);
            sc_dps_trace* raw = nullptr;
            check(sc_dps_run(series.get(), &cfg, H, W, delta, &raw), "dps " + describe(d) + " " + method);
            const TracePtr trace(raw);
            sc_dps_summary s{};
            check(sc_dps_summary_get(trace.get(), &s), "dps summary");
            std::uint64_t projected = 0;
            check(sc_ring_network_savings(C, D, s.saved_fraction, &projected), "ring projection");

            const std::string file = "trace_" + d.family + "_" + std::to_string(d.group) + "_" + method + ".jsonl";
            check(sc_dps_write_jsonl(trace.get(), (dir / file).string().c_str(), hash.c_str()), "write trace");

            summary["runs"].push_back({{"family", d.family},
                                       {"group", d.group},
                                       {"method", method},
                                       {"delta", delta},
                                       {"H", H},
                                       {"W", W},
                                       {"steps", s.steps},
                                       {"post_bootstrap_steps", s.post_bootstrap_steps},
                                       {"measurements", s.measurements},
                                       {"model_updates", s.model_updates},
                                       {"model_overhead", s.model_overhead},
                                       {"fallback_windows", s.fallbacks},
                                       {"wire_bytes", s.wire_bytes},
                                       {"saved_pct", s.saved_fraction},
                                       {"max_abs_error", s.max_abs_error},
                                       {"network_savings", projected},
                                       {"trace", file}});
            std::printf("%-12s g%d %-11s saved %6.2f%%  tx %zu/%zu  updates %zu  network saves %llu of %llu\n",
                        d.family.c_str(), d.group, method.c_str(), s.saved_fraction, s.measurements,
                        s.post_bootstrap_steps, s.model_updates, static_cast<unsigned long long>(projected),
                        static_cast<unsigned long long>(ring_total));
        }
    }
    write_text(dir / "dps_summary.json", summary.dump(2) + "\n");
    std::cout << "manifest " << hash << "\n";
    return kExitOk;
}

// ---- calibrate --------------------------------------------------------------

struct CalibrateOptions {
    DatasetFlags dataset;
    double target = 0.5;
    std::uint64_t seed = 0;
};

int cmd_calibrate(const CalibrateOptions& o) {
    if (!o.dataset.given()) {
        throw UsageError("calibrate needs --family (and --data unless the family is ball)");
    }
    const DatasetSpec d = o.dataset.spec();
    const SeriesPtr series = load_dataset(d, o.seed);
    double r = 0.0;
    check(sc_calibrate_resolution(series.get(), o.target, &r), "calibrate " + describe(d));
    json out = {{"family", d.family}, {"group", d.group}, {"target", o.target}, {"resolution", r}};
    if (!d.path.empty()) {
        out["path"] = d.path;
    }
    std::cout << out.dump() << "\n";
    return kExitOk;
}

// ---- ring -------------------------------------------------------------------

struct RingOptions {
    std::uint64_t c = 5;
    std::uint64_t d = 3;
    std::optional<double> percent;
};

int cmd_ring(const RingOptions& o) {
    std::uint64_t nodes = 0;
    std::uint64_t total = 0;
    double printed = 0.0;
    if (sc_ring_total_nodes(o.c, o.d, &nodes) != SC_OK || sc_ring_total_transmissions(o.c, o.d, &total) != SC_OK ||
        sc_ring_printed_closed_form(o.c, o.d, &printed) != SC_OK) {
        throw UsageError(std::string("ring: ") + sc_last_error());
    }
    json out = {{"C", o.c}, {"D", o.d}, {"nodes", nodes}, {"transmissions", total}};
    json rings = json::array();
    for (std::uint64_t ring = 1; ring <= o.d; ++ring) {
        std::uint64_t n = 0;
        check(sc_ring_nodes_in_ring(o.c, o.d, ring, &n), "ring");
        rings.push_back(n);
    }
    out["nodes_per_ring"] = rings;
    out["printed_closed_form"] = printed;
    out["printed_closed_form_note"] = "reference only; does not match the hop count";
    if (o.percent) {
        std::uint64_t saved = 0;
        if (sc_ring_network_savings(o.c, o.d, *o.percent, &saved) != SC_OK) {
            throw UsageError(std::string("ring: ") + sc_last_error());
        }
        out["saved_pct"] = *o.percent;
        out["network_savings"] = saved;
    }
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sensorcast: forecasting and dual-prediction experiments for sensor networks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(sc_version()));

    GenerateOptions gen;
    auto* g = app.add_subcommand("generate", "Write synthetic Ball series as CSV");
    g->add_flag("--standard", gen.standard, "Write the three standard Ball configurations");
    g->add_option("--theta0", gen.theta0, "Initial amplitude")->check(CLI::PositiveNumber);
    g->add_option("--lambda", gen.lambda, "Bounce frequency")->check(CLI::PositiveNumber);
    g->add_option("--gamma", gen.gamma, "Damping rate")->check(CLI::NonNegativeNumber);
    g->add_option("--dt", gen.dt, "Sampling interval")->check(CLI::PositiveNumber);
    g->add_option("--n", gen.n, "Number of samples (default 2800)")->check(CLI::PositiveNumber);
    g->add_option("--seed", gen.seed, "Noise seed");
    g->add_flag("--no-noise", gen.no_noise, "Write the noise-free signal");
    g->add_option("--out", gen.out, "Output directory");

    EvaluateOptions ev;
    auto* e = app.add_subcommand("evaluate", "Run the split-based accuracy and savings grid");
    e->add_option("--manifest", ev.manifest_path, "JSON manifest; flags override its values")
        ->check(CLI::ExistingFile);
    ev.dataset.add_to(e);
    e->add_option("--methods", ev.methods, "Methods to evaluate")->delimiter(',');
    e->add_option("--history", ev.history, "History sizes")->delimiter(',');
    e->add_option("--window", ev.window, "Window sizes")->delimiter(',');
    e->add_option("--splits", ev.splits, "Splits per scenario")->check(CLI::PositiveNumber);
    e->add_option("--seed", ev.seed, "Master seed for splits and noise");
    e->add_option("--budget", ev.budget, "Optimizer budget 1..10")->check(CLI::Range(1, 10));
    e->add_option("--workers", ev.workers, "Worker threads (default: all cores)")->check(CLI::PositiveNumber);
    e->add_option("--out", ev.out, "Output directory");

    DpsOptions dp;
    auto* d = app.add_subcommand("dps", "Simulate the dual prediction scheme and write traces");
    d->add_option("--manifest", dp.manifest_path, "JSON manifest; flags override its values")
        ->check(CLI::ExistingFile);
    dp.dataset.add_to(d);
    d->add_option("--methods", dp.methods, "Methods to simulate")->delimiter(',');
    d->add_option("--history", dp.history, "History size H")->check(CLI::PositiveNumber);
    d->add_option("--window", dp.window, "Window size W")->check(CLI::PositiveNumber);
    d->add_option("--seed", dp.seed, "Seed for generated data and interpolation noise");
    d->add_option("--budget", dp.budget, "Optimizer budget 1..10")->check(CLI::Range(1, 10));
    d->add_option("--ring-c", dp.ring_c, "Ring model neighbours C for the network projection")
        ->check(CLI::PositiveNumber);
    d->add_option("--ring-d", dp.ring_d, "Ring model depth D for the network projection")
        ->check(CLI::PositiveNumber);
    d->add_option("--out", dp.out, "Output directory");

    CalibrateOptions cal;
    auto* c = app.add_subcommand("calibrate", "Estimate a sensor resolution from equal consecutive readings");
    cal.dataset.add_to(c);
    c->add_option("--target", cal.target, "Required fraction of equal consecutive pairs")
        ->check(CLI::Range(0.0, 1.0));
    c->add_option("--seed", cal.seed, "Seed for generated data and interpolation noise");

    RingOptions ring;
    auto* r = app.add_subcommand("ring", "Ring topology transmission arithmetic");
    r->add_option("--c", ring.c, "Average neighbours C")->check(CLI::PositiveNumber);
    r->add_option("--d", ring.d, "Number of rings D")->check(CLI::PositiveNumber);
    r->add_option("--percent", ring.percent, "Per-node savings percentage to project")
        ->check(CLI::Range(0.0, 100.0));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int rc = app.exit(err);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (g->parsed()) {
            return cmd_generate(gen);
        }
        if (e->parsed()) {
            return cmd_evaluate(ev);
        }
        if (d->parsed()) {
            return cmd_dps(dp);
        }
        if (c->parsed()) {
            return cmd_calibrate(cal);
        }
        return cmd_ring(ring);
    } catch (const UsageError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsage;
    } catch (const ApiError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return err.status == SC_ERR_INVALID_ARGUMENT ? kExitUsage : kExitData;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitData;
    }
}
