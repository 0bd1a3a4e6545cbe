#include "sensorcast/evaluation.hpp"

#include "sensorcast/error.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <thread>

namespace sensorcast::eval {

namespace {

constexpr double kZ95 = 1.96;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Moments {
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t n = 0;
};

// Sample mean and standard deviation over the finite entries.
Moments moments(std::span<const double> xs) {
    Moments m;
    double sum = 0.0;
    for (double x : xs) {
        if (std::isfinite(x)) {
            sum += x;
            ++m.n;
        }
    }
    if (m.n == 0) {
        m.mean = kNaN;
        return m;
    }
    m.mean = sum / static_cast<double>(m.n);
    if (m.n > 1) {
        double acc = 0.0;
        for (double x : xs) {
            if (std::isfinite(x)) {
                acc += (x - m.mean) * (x - m.mean);
            }
        }
        m.stddev = std::sqrt(acc / static_cast<double>(m.n - 1));
    }
    return m;
}

double json_number(const nlohmann::json& j) {
    return j.is_null() ? kNaN : j.get<double>();
}

} // namespace

MapeResult mape(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size() || actual.empty()) {
        throw InvalidArgument("mape: need two sequences of equal, non-zero length");
    }
    MapeResult r;
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (std::abs(actual[i]) <= 1e-12) {
            ++r.skipped;
            continue;
        }
        sum += std::abs(100.0 * (actual[i] - predicted[i]) / actual[i]);
        ++used;
    }
    if (used == 0) {
        throw DataError("mape: every term has a zero denominator");
    }
    r.value = sum / static_cast<double>(used);
    return r;
}

std::size_t count_avoided(MethodKind method, double last_history_value,
                          std::span<const double> forecasts, std::span<const double> actual,
                          double delta_min) {
    if (forecasts.size() != actual.size()) {
        throw InvalidArgument("count_avoided: forecast and actual lengths differ");
    }
    std::size_t avoided = 0;
    if (method == MethodKind::Constant) {
        double base = last_history_value;
        for (double a : actual) {
            if (std::abs(base - a) < delta_min) {
                ++avoided;
            } else {
                base = a;
            }
        }
        return avoided;
    }
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (std::abs(forecasts[i] - actual[i]) < delta_min) {
            ++avoided;
        }
    }
    return avoided;
}

SplitOutcome evaluate_split(const Split& split, const FitConfig& method, double delta_min) {
    SplitOutcome out;
    out.origin = split.origin_index;
    ForecastModel model;
    try {
        model = fit(split.history, method);
    } catch (const Error&) {
        model = fit_constant(split.history);
        out.fallback = true;
    }
    const auto predicted = forecast(model, split.window.size());
    try {
        const auto m = mape(split.window, predicted);
        out.mape = m.value;
        out.skipped_terms = m.skipped;
    } catch (const DataError&) {
        out.mape = kNaN;
        out.skipped_terms = split.window.size();
    }
    out.avoided = count_avoided(method.method, split.history.back(), predicted, split.window, delta_min);
    return out;
}

ScenarioRow run_scenario(const Scenario& scenario, const TimeSeries& series) {
    const double delta = scenario.descriptor.delta_min;
    if (!(delta > 0.0)) {
        throw InvalidArgument("run_scenario: delta_min must be positive");
    }
    const auto splits =
        extract_splits(series, scenario.history, scenario.window, scenario.n_splits, scenario.seed);

    ScenarioRow row;
    row.family = std::string(data::family_name(scenario.descriptor.family));
    row.group = scenario.descriptor.group;
    row.method = std::string(method_name(scenario.method.method));
    row.history = scenario.history;
    row.window = scenario.window;
    row.n_splits = scenario.n_splits;
    row.seed = scenario.seed;
    row.delta_min = delta;
    row.model_updates = scenario.method.method == MethodKind::Constant ? 0.0 : 1.0;

    std::vector<double> avoided;
    for (const auto& split : splits) {
        const auto o = evaluate_split(split, scenario.method, delta);
        row.split_origins.push_back(o.origin);
        row.split_mape.push_back(o.mape);
        row.split_avoided.push_back(o.avoided);
        avoided.push_back(static_cast<double>(o.avoided));
        row.skipped_terms += o.skipped_terms;
        row.fallback_fits += o.fallback ? 1 : 0;
    }
    const auto m = moments(row.split_mape);
    row.mape_mean = m.mean;
    row.mape_std = m.stddev;
    row.ci95 = m.n > 0 ? kZ95 * m.stddev / std::sqrt(static_cast<double>(m.n)) : kNaN;
    row.avoided_mean = moments(avoided).mean;
    row.saved_pct = 100.0 * row.avoided_mean / static_cast<double>(scenario.window);
    return row;
}

Comparison paired_comparison(std::span<const double> candidate, std::span<const double> baseline) {
    if (candidate.size() != baseline.size()) {
        throw InvalidArgument("paired_comparison: sample sizes differ");
    }
    std::vector<double> diff;
    diff.reserve(candidate.size());
    for (std::size_t i = 0; i < candidate.size(); ++i) {
        if (std::isfinite(candidate[i]) && std::isfinite(baseline[i])) {
            diff.push_back(baseline[i] - candidate[i]);
        }
    }
    if (diff.size() < 2) {
        throw DataError("paired_comparison: fewer than two usable pairs");
    }
    const auto m = moments(diff);
    Comparison c;
    c.pairs = m.n;
    c.mean_difference = m.mean;
    c.half_width = kZ95 * m.stddev / std::sqrt(static_cast<double>(m.n));
    c.significant = m.mean - c.half_width > 0.0 || m.mean + c.half_width < 0.0;
    c.favours_candidate = m.mean > 0.0;
    return c;
}

Comparison compare_to_baseline(const ScenarioRow& candidate, const ScenarioRow& baseline) {
    if (candidate.split_origins != baseline.split_origins) {
        throw InvalidArgument("compare_to_baseline: rows were evaluated on different splits");
    }
    return paired_comparison(candidate.split_mape, baseline.split_mape);
}

bool fairness_filter(double candidate_avoided_mean, double constant_avoided_mean) {
    return candidate_avoided_mean - constant_avoided_mean >= 2.0;
}

bool fairness_filter(const ScenarioRow& candidate, const ScenarioRow& constant) {
    return fairness_filter(candidate.avoided_mean, constant.avoided_mean);
}

double equal_pair_fraction(std::span<const double> values) {
    if (values.size() < 2) {
        throw InvalidArgument("equal_pair_fraction: need at least two values");
    }
    std::size_t equal = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        equal += values[i] == values[i - 1] ? 1 : 0;
    }
    return static_cast<double>(equal) / static_cast<double>(values.size() - 1);
}

std::vector<double> resolution_grid(std::span<const double> values) {
    constexpr std::size_t kPoints = 1024;
    constexpr double kUpperFactor = 4.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double d = std::abs(values[i] - values[i - 1]);
        if (d > 0.0) {
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
    }
    if (hi == 0.0) {
        throw DataError("calibrate_resolution: series is constant");
    }
    hi *= kUpperFactor;
    std::vector<double> grid(kPoints);
    const double ratio = std::log(hi / lo);
    for (std::size_t i = 0; i < kPoints; ++i) {
        grid[i] = lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(kPoints - 1));
    }
    return grid;
}

double calibrate_resolution(std::span<const double> values, double target) {
    if (values.size() < 2) {
        throw InvalidArgument("calibrate_resolution: need at least two values");
    }
    if (!(target > 0.0 && target < 1.0)) {
        throw InvalidArgument("calibrate_resolution: target must lie in (0, 1)");
    }
    std::vector<double> q(values.size());
    for (double r : resolution_grid(values)) {
        std::transform(values.begin(), values.end(), q.begin(),
                       [r](double v) { return quantize_value(v, r); });
        if (equal_pair_fraction(q) >= target) {
            return r;
        }
    }
    throw DataError("calibrate_resolution: no resolution on the grid reaches the target fraction");
}

std::vector<ScenarioRow> run_grid(std::span<const GridJob> jobs, unsigned workers) {
    if (workers == 0) {
        workers = std::max(1U, std::thread::hardware_concurrency());
    }
    workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));

    std::vector<ScenarioRow> rows(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                if (jobs[i].series == nullptr) {
                    throw InvalidArgument("run_grid: job without a series");
                }
                rows[i] = run_scenario(jobs[i].scenario, *jobs[i].series);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }

    for (auto& row : rows) {
        if (row.method == method_name(MethodKind::Constant)) {
            continue;
        }
        for (const auto& other : rows) {
            if (other.method == method_name(MethodKind::Constant) && other.family == row.family &&
                other.group == row.group && other.history == row.history &&
                other.window == row.window && other.seed == row.seed) {
                row.fairness = fairness_filter(row, other);
                break;
            }
        }
    }
    return rows;
}

std::string report_csv(std::span<const ScenarioRow> rows) {
    std::string out = "family,group,method,H,W,mape_mean,mape_std,ci95,avoided_mean,saved_pct,"
                      "model_updates,fairness,skipped_terms\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.family, r.group, r.method,
                           r.history, r.window, r.mape_mean, r.mape_std, r.ci95, r.avoided_mean,
                           r.saved_pct, r.model_updates, r.fairness ? "true" : "false",
                           r.skipped_terms);
    }
    return out;
}

std::string report_json(std::span<const ScenarioRow> rows, const std::string& manifest_hash,
                        const std::string& manifest_json) {
    using nlohmann::ordered_json;
    ordered_json doc;
    doc["manifest_hash"] = manifest_hash;
    doc["manifest"] = ordered_json::parse(manifest_json.empty() ? "{}" : manifest_json);
    doc["rows"] = ordered_json::array();
    for (const auto& r : rows) {
        doc["rows"].push_back(ordered_json{
            {"family", r.family},
            {"group", r.group},
            {"method", r.method},
            {"H", r.history},
            {"W", r.window},
            {"n_splits", r.n_splits},
            {"seed", r.seed},
            {"delta_min", r.delta_min},
            {"mape_mean", r.mape_mean},
            {"mape_std", r.mape_std},
            {"ci95", r.ci95},
            {"avoided_mean", r.avoided_mean},
            {"saved_pct", r.saved_pct},
            {"model_updates", r.model_updates},
            {"fairness", r.fairness},
            {"skipped_terms", r.skipped_terms},
            {"fallback_fits", r.fallback_fits},
            {"split_origins", r.split_origins},
            {"split_mape", r.split_mape},
            {"split_avoided", r.split_avoided},
        });
    }
    return doc.dump(2) + "\n";
}

std::vector<ScenarioRow> parse_report_json(const std::string& text) {
    std::vector<ScenarioRow> rows;
    try {
        const auto doc = nlohmann::json::parse(text);
        for (const auto& j : doc.at("rows")) {
            ScenarioRow r;
            r.family = j.at("family").get<std::string>();
            r.group = j.at("group").get<int>();
            r.method = j.at("method").get<std::string>();
            r.history = j.at("H").get<std::size_t>();
            r.window = j.at("W").get<std::size_t>();
            r.n_splits = j.at("n_splits").get<std::size_t>();
            r.seed = j.at("seed").get<std::uint64_t>();
            r.delta_min = json_number(j.at("delta_min"));
            r.mape_mean = json_number(j.at("mape_mean"));
            r.mape_std = json_number(j.at("mape_std"));
            r.ci95 = json_number(j.at("ci95"));
            r.avoided_mean = json_number(j.at("avoided_mean"));
            r.saved_pct = json_number(j.at("saved_pct"));
            r.model_updates = json_number(j.at("model_updates"));
            r.fairness = j.at("fairness").get<bool>();
            r.skipped_terms = j.at("skipped_terms").get<std::size_t>();
            r.fallback_fits = j.at("fallback_fits").get<std::size_t>();
            r.split_origins = j.at("split_origins").get<std::vector<std::size_t>>();
            for (const auto& v : j.at("split_mape")) {
                r.split_mape.push_back(json_number(v));
            }
            r.split_avoided = j.at("split_avoided").get<std::vector<std::size_t>>();
            rows.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("parse_report_json: ") + e.what());
    }
    return rows;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open " + tmp.string() + " for writing");
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) {
            throw IoError("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move report into place at " + path.string());
    }
}

void emit_report(std::span<const ScenarioRow> rows, const std::filesystem::path& json_path,
                 const std::filesystem::path& csv_path, const std::string& manifest_hash,
                 const std::string& manifest_json) {
    if (rows.empty()) {
        throw InvalidArgument("emit_report: no rows");
    }
    write_file_atomic(json_path, report_json(rows, manifest_hash, manifest_json));
    write_file_atomic(csv_path, report_csv(rows));
}

} // namespace sensorcast::eval
