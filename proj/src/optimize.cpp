#include "sensorcast/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sensorcast::optimize {

namespace {

double safe_eval(const std::function<double(std::span<const double>)>& f,
                 std::span<const double> x) {
    const double v = f(x);
    return std::isnan(v) ? HUGE_VAL : v;
}

} // namespace

SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                          std::vector<double> start, double step, int max_iterations,
                          double tolerance) {
    constexpr double kReflect = 1.0;
    constexpr double kExpand = 2.0;
    constexpr double kContract = 0.5;
    constexpr double kShrink = 0.5;

    const std::size_t n = start.size();
    SimplexResult result;
    if (n == 0) {
        result.value = safe_eval(objective, start);
        result.trace.push_back(result.value);
        return result;
    }

    std::vector<std::vector<double>> vertex(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) {
        const double scale = std::max(step, step * std::abs(start[i]));
        vertex[i + 1][i] += scale;
    }
    std::vector<double> value(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        value[i] = safe_eval(objective, vertex[i]);
    }

    std::vector<std::size_t> order(n + 1);
    auto sort_vertices = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
    };
    sort_vertices();
    result.trace.push_back(value[order[0]]);

    std::vector<double> centroid(n), trial(n), trial2(n);
    auto along = [&](double t, std::vector<double>& out, const std::vector<double>& worst) {
        for (std::size_t j = 0; j < n; ++j) {
            out[j] = centroid[j] + t * (worst[j] - centroid[j]);
        }
    };

    int it = 0;
    for (; it < max_iterations; ++it) {
        const std::size_t best = order[0];
        const std::size_t worst = order[n];
        const std::size_t second = order[n - 1];
        if (std::abs(value[worst] - value[best]) <= tolerance * (std::abs(value[best]) + tolerance)) {
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                centroid[j] += vertex[order[i]][j];
            }
        }
        for (double& c : centroid) {
            c /= static_cast<double>(n);
        }

        along(-kReflect, trial, vertex[worst]);
        const double reflected = safe_eval(objective, trial);
        if (reflected < value[best]) {
            along(-kExpand, trial2, vertex[worst]);
            const double expanded = safe_eval(objective, trial2);
            if (expanded < reflected) {
                vertex[worst] = trial2;
                value[worst] = expanded;
            } else {
                vertex[worst] = trial;
                value[worst] = reflected;
            }
        } else if (reflected < value[second]) {
            vertex[worst] = trial;
            value[worst] = reflected;
        } else {
            const bool outside = reflected < value[worst];
            along(outside ? -kContract : kContract, trial2, vertex[worst]);
            const double contracted = safe_eval(objective, trial2);
            if (contracted < std::min(reflected, value[worst])) {
                vertex[worst] = trial2;
                value[worst] = contracted;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    auto& v = vertex[order[i]];
                    for (std::size_t j = 0; j < n; ++j) {
                        v[j] = vertex[best][j] + kShrink * (v[j] - vertex[best][j]);
                    }
                    value[order[i]] = safe_eval(objective, v);
                }
            }
        }
        sort_vertices();
        result.trace.push_back(value[order[0]]);
    }

    result.x = vertex[order[0]];
    result.value = value[order[0]];
    result.iterations = it;
    return result;
}

ScalarResult golden_section(const std::function<double(double)>& f, double lo, double hi,
                            int iterations) {
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int i = 0; i < iterations; ++i) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? ScalarResult{c, fc} : ScalarResult{d, fd};
}

} // namespace sensorcast::optimize
