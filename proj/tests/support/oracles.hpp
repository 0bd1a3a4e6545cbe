#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's estimation code.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

namespace oracle {

inline std::vector<double> random_walk(std::size_t n, std::uint64_t seed, double start = 20.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> step(0.0, 1.0);
    std::vector<double> v(n);
    double x = start;
    for (auto& e : v) {
        x += step(rng);
        e = x;
    }
    return v;
}

inline std::vector<double> ar1(std::size_t n, double phi, std::uint64_t seed, std::size_t burn = 200) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> eps(0.0, 1.0);
    std::vector<double> v;
    v.reserve(n);
    double x = 0.0;
    for (std::size_t i = 0; i < n + burn; ++i) {
        x = phi * x + eps(rng);
        if (i >= burn) {
            v.push_back(x);
        }
    }
    return v;
}

/// Lag-1 Yule-Walker estimate r1 / r0 on the demeaned series.
inline double yule_walker_ar1(std::span<const double> x) {
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double r0 = 0.0;
    double r1 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        r0 += (x[i] - mean) * (x[i] - mean);
        if (i > 0) {
            r1 += (x[i] - mean) * (x[i - 1] - mean);
        }
    }
    return r1 / r0;
}

/// Hop-by-hop simulation of the ring model: every node in ring d originates
/// one message, which is relayed one ring inward per hop until it reaches
/// the gateway. Counts every forwarding event.
inline std::uint64_t ring_hops_by_simulation(std::uint64_t c, std::uint64_t depth) {
    std::uint64_t hops = 0;
    for (std::uint64_t ring = 1; ring <= depth; ++ring) {
        const std::uint64_t nodes = c * (2 * ring - 1);
        for (std::uint64_t node = 0; node < nodes; ++node) {
            std::uint64_t position = ring;
            while (position > 0) {
                --position;
                ++hops;
            }
        }
    }
    return hops;
}

/// Classic send-on-delta: transmit when |x - last sent| >= delta. Returns a
/// 0/1 flag per element of `values`; the first element is always sent
/// relative to `base`.
inline std::vector<std::uint8_t> send_on_delta(std::span<const double> values, double base, double delta) {
    std::vector<std::uint8_t> sent(values.size(), 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::abs(values[i] - base) >= delta) {
            sent[i] = 1;
            base = values[i];
        }
    }
    return sent;
}

inline double equal_pairs_after_rounding(std::span<const double> v, double r) {
    std::size_t equal = 0;
    auto q = [r](double x) { return std::round(x / r) * r; };
    for (std::size_t i = 1; i < v.size(); ++i) {
        equal += q(v[i]) == q(v[i - 1]) ? 1 : 0;
    }
    return static_cast<double>(equal) / static_cast<double>(v.size() - 1);
}

} // namespace oracle
