#include "sensorcast/error.hpp"
#include "sensorcast/series.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>
#include <set>

using namespace sensorcast;
using Catch::Approx;

namespace {

TimeSeries make(std::vector<double> t, std::vector<double> v) {
    TimeSeries s;
    s.timestamps = std::move(t);
    s.values = std::move(v);
    return s;
}

} // namespace

TEST_CASE("validate rejects broken series") {
    CHECK_NOTHROW(make({0, 1}, {1, 2}).validate());
    CHECK_THROWS_AS(make({0, 1}, {1}).validate(), InvalidArgument);
    CHECK_THROWS_AS(make({1, 1}, {1, 2}).validate(), InvalidArgument);
    CHECK_THROWS_AS(make({0, 1}, {1, NAN}).validate(), InvalidArgument);
    auto s = make({0}, {1});
    s.resolution = 0.0;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
}

TEST_CASE("interpolate_gaps fills a midpoint") {
    const auto out = interpolate_gaps(make({0, 2}, {10, 14}), 1.0);
    CHECK(out.timestamps == std::vector<double>{0, 1, 2});
    CHECK(out.values == std::vector<double>{10, 12, 14});
}

TEST_CASE("interpolate_gaps leaves a regular series alone") {
    const auto in = make({0, 1, 2, 3}, {5, 1, 4, 2});
    const auto out = interpolate_gaps_with_mask(in, 1.0);
    CHECK(out.series.values == in.values);
    CHECK(out.series.timestamps == in.timestamps);
    CHECK(std::accumulate(out.inserted.begin(), out.inserted.end(), 0) == 0);
}

TEST_CASE("interpolate_gaps over a three-step gap") {
    const auto out = interpolate_gaps_with_mask(make({0, 3}, {1, 4}), 1.0);
    CHECK(out.series.values == std::vector<double>{1, 2, 3, 4});
    CHECK(out.inserted == std::vector<std::uint8_t>{0, 1, 1, 0});
}

TEST_CASE("interpolate_gaps needs two points") {
    CHECK_THROWS(interpolate_gaps(make({}, {}), 1.0));
    CHECK_THROWS(interpolate_gaps(make({0}, {1}), 1.0));
}

TEST_CASE("interpolate_gaps is idempotent") {
    const auto once = interpolate_gaps(make({0, 30, 120, 150, 300}, {1, 2, 8, 3, 0}), 30.0);
    const auto twice = interpolate_gaps(once, 30.0);
    CHECK(once.values == twice.values);
    CHECK(once.timestamps == twice.timestamps);
    CHECK(once.size() == 11);
}

TEST_CASE("add_white_noise with sigma 0 is the identity") {
    const auto in = TimeSeries::from_values({1, 2, 3});
    CHECK(add_white_noise(in, 0.0, 7).values == in.values);
}

TEST_CASE("add_white_noise is deterministic under a seed") {
    const auto in = TimeSeries::from_values(std::vector<double>(100, 3.0));
    CHECK(add_white_noise(in, 0.5, 11).values == add_white_noise(in, 0.5, 11).values);
    CHECK(add_white_noise(in, 0.5, 11).values != add_white_noise(in, 0.5, 12).values);
}

TEST_CASE("add_white_noise has the requested spread") {
    const auto in = TimeSeries::from_values(std::vector<double>(10000, 0.0));
    const auto out = add_white_noise(in, 1.0, 2024);
    const double n = static_cast<double>(out.size());
    const double mean = std::accumulate(out.values.begin(), out.values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : out.values) {
        ss += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(ss / (n - 1));
    CHECK(sd >= 0.95);
    CHECK(sd <= 1.05);
}

TEST_CASE("add_white_noise with a mask touches only masked points") {
    const auto in = TimeSeries::from_values({1, 2, 3, 4});
    const std::vector<std::uint8_t> mask{0, 1, 0, 1};
    const auto masked = add_white_noise(in, 1.0, 5, mask);
    const auto full = add_white_noise(in, 1.0, 5);
    CHECK(masked.values[0] == 1);
    CHECK(masked.values[2] == 3);
    CHECK(masked.values[1] == full.values[1]);
    CHECK(masked.values[3] == full.values[3]);
    CHECK_THROWS(add_white_noise(in, -1.0, 5));
}

TEST_CASE("quantization of the temperature example") {
    const auto in = TimeSeries::from_values({20.1, 20.1, 20.4, 20.6, 21.5, 21.6, 21.8});
    CHECK(quantize_to_resolution(in, 0.5).values ==
          std::vector<double>{20.0, 20.0, 20.5, 20.5, 21.5, 21.5, 22.0});
    CHECK(quantize_to_resolution(in, 0.1).values == in.values);
}

TEST_CASE("quantization rounds half away from zero") {
    CHECK(quantize_value(-0.26, 0.5) == -0.5);
    CHECK(quantize_value(0.25, 0.5) == 0.5);
    CHECK(quantize_value(-0.25, 0.5) == -0.5);
    CHECK(quantize_value(0.24, 0.5) == 0.0);
    CHECK_THROWS_AS(quantize_value(1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(quantize_value(1.0, -0.5), InvalidArgument);
}

TEST_CASE("quantization is idempotent and lands on the grid") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (double r : {0.001, 0.01, 0.045166015625, 0.3, 0.5, 2.0, 7.0}) {
        std::vector<double> v(200);
        for (auto& x : v) {
            x = u(rng);
        }
        const auto once = quantize_to_resolution(TimeSeries::from_values(v), r);
        const auto twice = quantize_to_resolution(once, r);
        REQUIRE(once.values == twice.values);
        for (std::size_t i = 1; i < once.size(); ++i) {
            const double steps = std::abs(once.values[i] - once.values[i - 1]) / r;
            CHECK(std::abs(steps - std::round(steps)) * r <= 1e-9 * r + 1e-12);
        }
    }
}

TEST_CASE("a single valid origin yields the whole series") {
    std::vector<double> v(10);
    std::iota(v.begin(), v.end(), 0.0);
    const auto splits = extract_splits(v, 5, 5, 20, 1);
    REQUIRE(splits.size() == 20);
    for (const auto& s : splits) {
        CHECK(s.origin_index == 0);
        CHECK(s.history == std::vector<double>{0, 1, 2, 3, 4});
        CHECK(s.window == std::vector<double>{5, 6, 7, 8, 9});
    }
}

TEST_CASE("splits are deterministic and in range") {
    std::vector<double> v(1000);
    std::iota(v.begin(), v.end(), 0.0);
    const auto a = extract_splits(v, 100, 10, 200, 42);
    const auto b = extract_splits(v, 100, 10, 200, 42);
    REQUIRE(a.size() == 200);
    std::set<std::size_t> origins;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].origin_index == b[i].origin_index);
        CHECK(a[i].origin_index <= 890);
        CHECK(a[i].history.size() == 100);
        CHECK(a[i].window.size() == 10);
        CHECK(a[i].history.front() == static_cast<double>(a[i].origin_index));
        CHECK(a[i].window.front() == a[i].history.back() + 1.0);
        CHECK(a[i].origin_index + 110 <= v.size());
        origins.insert(a[i].origin_index);
    }
    CHECK(origins.size() == 200);
}

TEST_CASE("extract_splits rejects short series and zero sizes") {
    std::vector<double> v(9, 1.0);
    CHECK_THROWS(extract_splits(v, 5, 5, 1, 0));
    CHECK_THROWS(extract_splits(v, 0, 5, 1, 0));
    CHECK_THROWS(extract_splits(v, 5, 0, 1, 0));
}
