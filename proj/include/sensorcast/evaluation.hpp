#pragma once

#include "sensorcast/datasets.hpp"
#include "sensorcast/forecast.hpp"
#include "sensorcast/series.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace sensorcast::eval {

inline constexpr std::size_t kHistoryGrid[] = {5, 10, 20, 50, 100, 200, 500, 1000};
inline constexpr std::size_t kWindowGrid[] = {1, 5, 10, 20, 50, 100, 200, 500, 1000};

struct MapeResult {
    double value = 0.0;
    std::size_t skipped = 0;
};

/// Mean of |100 (a - p) / a| over terms with |a| > 1e-12. Throws DataError when
/// every term is skipped.
MapeResult mape(std::span<const double> actual, std::span<const double> predicted);

/**
 * Transmissions avoided over one window: steps whose reconstruction needs no
 * measurement. Model-based methods use the static forecasts; Constant replays
 * the reset rule (every transmitted value becomes the new base).
 */
std::size_t count_avoided(MethodKind method, double last_history_value,
                          std::span<const double> forecasts, std::span<const double> actual,
                          double delta_min);

struct Scenario {
    data::DatasetDescriptor descriptor;
    FitConfig method;
    std::size_t history = 100;
    std::size_t window = 10;
    std::size_t n_splits = 200;
    std::uint64_t seed = 0;
};

struct SplitOutcome {
    std::size_t origin = 0;
    /// NaN when every MAPE term of the split had a zero denominator.
    double mape = 0.0;
    std::size_t skipped_terms = 0;
    std::size_t avoided = 0;
    bool fallback = false;
};

SplitOutcome evaluate_split(const Split& split, const FitConfig& method, double delta_min);

struct ScenarioRow {
    std::string family;
    int group = 0;
    std::string method;
    std::size_t history = 0;
    std::size_t window = 0;
    std::size_t n_splits = 0;
    std::uint64_t seed = 0;
    double delta_min = 0.0;
    double mape_mean = 0.0;
    double mape_std = 0.0;
    double ci95 = 0.0;
    double avoided_mean = 0.0;
    double saved_pct = 0.0;
    /// ModelUpdate messages needed per window (0 for Constant, 1 otherwise).
    double model_updates = 0.0;
    bool fairness = false;
    std::size_t skipped_terms = 0;
    std::size_t fallback_fits = 0;
    std::vector<std::size_t> split_origins;
    std::vector<double> split_mape;
    std::vector<std::size_t> split_avoided;

    friend bool operator==(const ScenarioRow&, const ScenarioRow&) = default;
};

ScenarioRow run_scenario(const Scenario& scenario, const TimeSeries& series);

struct Comparison {
    bool significant = false;
    /// Mean of baseline - candidate per split; positive favours the candidate.
    double mean_difference = 0.0;
    double half_width = 0.0;
    bool favours_candidate = false;
    std::size_t pairs = 0;
};

/// Paired normal-approximation 95% interval on baseline - candidate.
Comparison paired_comparison(std::span<const double> candidate, std::span<const double> baseline);

/// Throws InvalidArgument unless both rows were evaluated on the same splits.
Comparison compare_to_baseline(const ScenarioRow& candidate, const ScenarioRow& baseline);

/// Candidate avoids at least 2 more transmissions per window than Constant.
bool fairness_filter(double candidate_avoided_mean, double constant_avoided_mean);
bool fairness_filter(const ScenarioRow& candidate, const ScenarioRow& constant);

/// Fraction of consecutive pairs with equal values.
double equal_pair_fraction(std::span<const double> values);

/// Geometric grid of candidate resolutions searched by calibrate_resolution.
std::vector<double> resolution_grid(std::span<const double> values);

/**
 * Smallest grid resolution whose quantized series has at least `target` of
 * its consecutive pairs equal. Throws DataError for constant series or when
 * no grid point reaches the target.
 */
double calibrate_resolution(std::span<const double> values, double target = 0.5);

struct GridJob {
    Scenario scenario;
    const TimeSeries* series = nullptr;
};

/// Runs jobs on `workers` threads (0 = hardware concurrency); rows come back in
/// job order. Sets the fairness flag of each non-Constant row against the
/// Constant row with the same family, group, history, window and seed, when present.
std::vector<ScenarioRow> run_grid(std::span<const GridJob> jobs, unsigned workers);

std::string report_csv(std::span<const ScenarioRow> rows);
std::string report_json(std::span<const ScenarioRow> rows, const std::string& manifest_hash,
                        const std::string& manifest_json);
std::vector<ScenarioRow> parse_report_json(const std::string& text);

/// Writes both files atomically (temporary file then rename).
void emit_report(std::span<const ScenarioRow> rows, const std::filesystem::path& json_path,
                 const std::filesystem::path& csv_path, const std::string& manifest_hash = {},
                 const std::string& manifest_json = "{}");

void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

} // namespace sensorcast::eval
