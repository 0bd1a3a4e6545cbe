#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sensorcast {

/**
 * Ordered, time-indexed sequence of scalar observations.
 *
 * Timestamps are seconds and strictly increasing; `resolution` is the
 * sensor's smallest reliably indicated change, in the same unit as the values.
 */
struct TimeSeries {
    std::vector<double> timestamps;
    std::vector<double> values;
    std::string unit;
    double resolution = 1.0;

    std::size_t size() const noexcept { return values.size(); }
    bool empty() const noexcept { return values.empty(); }

    /// Throws InvalidArgument if any invariant is broken.
    void validate() const;

    /// Series sampled at t = 0, period, 2*period, ...
    static TimeSeries from_values(std::vector<double> values, double period = 1.0,
                                  std::string unit = {}, double resolution = 1.0);
};

/// A history immediately followed by a window, both copied out of the parent.
struct Split {
    std::size_t origin_index = 0;
    std::vector<double> history;
    std::vector<double> window;
};

struct Interpolated {
    TimeSeries series;
    /// 1 where the point was inserted by interpolation, 0 where observed.
    std::vector<std::uint8_t> inserted;
};

/**
 * Fills gaps longer than `expected_period` with linearly interpolated points
 * spaced `expected_period` apart. Observed points are kept untouched, so a
 * series without gaps comes back unchanged.
 */
Interpolated interpolate_gaps_with_mask(const TimeSeries& series, double expected_period);
TimeSeries interpolate_gaps(const TimeSeries& series, double expected_period);

/**
 * Adds zero-mean Gaussian noise with standard deviation `sigma` from a
 * generator seeded with `seed`. When `mask` is non-empty only entries with a
 * non-zero mask are perturbed; the generator still advances once per point so
 * the draw for index i does not depend on the mask.
 */
TimeSeries add_white_noise(const TimeSeries& series, double sigma, std::uint64_t seed,
                           std::span<const std::uint8_t> mask = {});

/// round(v / r) * r, half away from zero.
double quantize_value(double value, double resolution);
TimeSeries quantize_to_resolution(const TimeSeries& series, double resolution);

/// Origins are drawn without replacement when at least `n_splits` distinct
/// origins exist, with replacement otherwise. Indexing is by observation.
std::vector<Split> extract_splits(std::span<const double> values, std::size_t history,
                                  std::size_t window, std::size_t n_splits, std::uint64_t seed);
std::vector<Split> extract_splits(const TimeSeries& series, std::size_t history,
                                  std::size_t window, std::size_t n_splits, std::uint64_t seed);

} // namespace sensorcast
