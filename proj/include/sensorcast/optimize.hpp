#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sensorcast::optimize {

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    /// Best objective value after each iteration, starting with the initial simplex.
    std::vector<double> trace;
};

/**
 * Nelder-Mead downhill simplex. The initial simplex is `start` plus one
 * vertex per coordinate displaced by `step` (or by `step` relative to the
 * coordinate when it is large). Stops after `max_iterations` or when the
 * spread of vertex values drops below `tolerance`.
 */
SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                          std::vector<double> start, double step, int max_iterations,
                          double tolerance = 1e-10);

struct ScalarResult {
    double x = 0.0;
    double value = 0.0;
};

/// Golden-section search for a minimum of f on [lo, hi], `iterations` shrink steps.
ScalarResult golden_section(const std::function<double(double)>& f, double lo, double hi,
                            int iterations);

} // namespace sensorcast::optimize
