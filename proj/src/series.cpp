#include "sensorcast/series.hpp"

#include "sensorcast/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

namespace sensorcast {

void TimeSeries::validate() const {
    if (timestamps.size() != values.size()) {
        throw InvalidArgument("time series: timestamps and values differ in length");
    }
    if (!(resolution > 0.0) || !std::isfinite(resolution)) {
        throw InvalidArgument("time series: resolution must be positive");
    }
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
        if (!(timestamps[i] > timestamps[i - 1])) {
            throw InvalidArgument("time series: timestamps not strictly increasing at index " +
                                  std::to_string(i));
        }
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw InvalidArgument("time series: non-finite value at index " + std::to_string(i));
        }
    }
}

TimeSeries TimeSeries::from_values(std::vector<double> values, double period, std::string unit,
                                   double resolution) {
    TimeSeries s;
    s.timestamps.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        s.timestamps[i] = static_cast<double>(i) * period;
    }
    s.values = std::move(values);
    s.unit = std::move(unit);
    s.resolution = resolution;
    return s;
}

Interpolated interpolate_gaps_with_mask(const TimeSeries& series, double expected_period) {
    if (series.size() < 2) {
        throw InvalidArgument("interpolate_gaps: need at least two observations");
    }
    if (!(expected_period > 0.0)) {
        throw InvalidArgument("interpolate_gaps: expected period must be positive");
    }
    // Points closer than this to the next observation are not inserted.
    const double slack = 1e-6 * expected_period;

    Interpolated out;
    out.series.unit = series.unit;
    out.series.resolution = series.resolution;
    auto& ts = out.series.timestamps;
    auto& vs = out.series.values;
    ts.reserve(series.size());
    vs.reserve(series.size());

    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
        const double t0 = series.timestamps[i];
        const double t1 = series.timestamps[i + 1];
        const double v0 = series.values[i];
        const double v1 = series.values[i + 1];
        ts.push_back(t0);
        vs.push_back(v0);
        out.inserted.push_back(0);
        for (std::size_t k = 1;; ++k) {
            const double t = t0 + static_cast<double>(k) * expected_period;
            if (t >= t1 - slack) {
                break;
            }
            ts.push_back(t);
            vs.push_back(v0 + (v1 - v0) * (t - t0) / (t1 - t0));
            out.inserted.push_back(1);
        }
    }
    ts.push_back(series.timestamps.back());
    vs.push_back(series.values.back());
    out.inserted.push_back(0);
    return out;
}

TimeSeries interpolate_gaps(const TimeSeries& series, double expected_period) {
    return interpolate_gaps_with_mask(series, expected_period).series;
}

TimeSeries add_white_noise(const TimeSeries& series, double sigma, std::uint64_t seed,
                           std::span<const std::uint8_t> mask) {
    if (!(sigma >= 0.0)) {
        throw InvalidArgument("add_white_noise: sigma must be non-negative");
    }
    if (!mask.empty() && mask.size() != series.size()) {
        throw InvalidArgument("add_white_noise: mask length differs from series length");
    }
    TimeSeries out = series;
    if (sigma == 0.0) {
        return out;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double draw = noise(rng);
        if (mask.empty() || mask[i] != 0) {
            out.values[i] += draw;
        }
    }
    return out;
}

double quantize_value(double value, double resolution) {
    if (!(resolution > 0.0) || !std::isfinite(resolution)) {
        throw InvalidArgument("quantize: resolution must be positive");
    }
    const double steps = std::round(value / resolution);
    const double snapped = steps * resolution;
    // Already on the grid: keep the exact input so repeated quantization is a no-op.
    if (std::abs(snapped - value) <= 1e-9 * resolution) {
        return value;
    }
    return snapped;
}

TimeSeries quantize_to_resolution(const TimeSeries& series, double resolution) {
    if (!(resolution > 0.0) || !std::isfinite(resolution)) {
        throw InvalidArgument("quantize_to_resolution: resolution must be positive");
    }
    TimeSeries out = series;
    for (double& v : out.values) {
        v = quantize_value(v, resolution);
    }
    out.resolution = resolution;
    return out;
}

std::vector<Split> extract_splits(std::span<const double> values, std::size_t history,
                                  std::size_t window, std::size_t n_splits, std::uint64_t seed) {
    if (history < 1 || window < 1) {
        throw InvalidArgument("extract_splits: history and window must be at least 1");
    }
    if (values.size() < history + window) {
        throw InvalidArgument("extract_splits: series of length " + std::to_string(values.size()) +
                              " is shorter than history + window = " +
                              std::to_string(history + window));
    }
    const std::size_t last_origin = values.size() - history - window;
    const std::size_t distinct = last_origin + 1;

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, last_origin);
    std::vector<std::size_t> origins;
    origins.reserve(n_splits);
    if (distinct >= n_splits) {
        std::unordered_set<std::size_t> seen;
        while (origins.size() < n_splits) {
            const std::size_t o = pick(rng);
            if (seen.insert(o).second) {
                origins.push_back(o);
            }
        }
    } else {
        for (std::size_t i = 0; i < n_splits; ++i) {
            origins.push_back(pick(rng));
        }
    }

    std::vector<Split> splits;
    splits.reserve(n_splits);
    for (std::size_t o : origins) {
        Split s;
        s.origin_index = o;
        s.history.assign(values.begin() + static_cast<std::ptrdiff_t>(o),
                         values.begin() + static_cast<std::ptrdiff_t>(o + history));
        s.window.assign(values.begin() + static_cast<std::ptrdiff_t>(o + history),
                        values.begin() + static_cast<std::ptrdiff_t>(o + history + window));
        splits.push_back(std::move(s));
    }
    return splits;
}

std::vector<Split> extract_splits(const TimeSeries& series, std::size_t history, std::size_t window,
                                  std::size_t n_splits, std::uint64_t seed) {
    return extract_splits(std::span<const double>(series.values), history, window, n_splits, seed);
}

} // namespace sensorcast
