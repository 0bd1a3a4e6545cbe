#include "oracles.hpp"

#include "sensorcast/forecast.hpp"
#include "sensorcast/optimize.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace sensorcast;
using Catch::Approx;

TEST_CASE("Nelder-Mead finds the Rosenbrock valley floor") {
    auto rosen = [](std::span<const double> x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    const auto r = optimize::nelder_mead(rosen, {-1.2, 1.0}, 0.5, 2000, 1e-14);
    CHECK(r.x[0] == Approx(1.0).margin(1e-3));
    CHECK(r.x[1] == Approx(1.0).margin(1e-3));
    CHECK(r.value < 1e-6);
}

TEST_CASE("Nelder-Mead trace never increases") {
    const auto w = oracle::ar1(300, 0.6, 4);
    auto objective = [&](std::span<const double> c) {
        return arima_detail::css(w, 1, 1, true, c, 1);
    };
    const auto r = optimize::nelder_mead(objective, {0.1, 0.1, 0.0}, 0.1, 200);
    REQUIRE(r.trace.size() >= 2);
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
        CHECK(r.trace[i] <= r.trace[i - 1]);
    }
    CHECK(r.value == r.trace.back());
    CHECK(r.iterations <= 200);
}

TEST_CASE("Nelder-Mead respects the iteration cap") {
    auto bowl = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; };
    const auto r = optimize::nelder_mead(bowl, {3.0, -2.0}, 1.0, 3);
    CHECK(r.iterations <= 3);
}

TEST_CASE("golden section on a parabola") {
    const auto r = optimize::golden_section([](double x) { return (x - 0.3) * (x - 0.3); }, 0.0, 1.0, 60);
    CHECK(r.x == Approx(0.3).margin(1e-9));
    CHECK(r.value == Approx(0.0).margin(1e-15));
}

TEST_CASE("CSS matches a hand recursion") {
    const std::vector<double> w{1.0, 0.5, -0.2, 0.7, 0.1};
    const double coef[] = {0.4, 0.3, 0.05}; // phi, theta, intercept
    std::vector<double> e(w.size(), 0.0);
    double sse = 0.0;
    for (std::size_t t = 1; t < w.size(); ++t) {
        e[t] = w[t] - 0.05 - 0.4 * w[t - 1] - 0.3 * e[t - 1];
        sse += e[t] * e[t];
    }
    std::vector<double> residuals;
    CHECK(arima_detail::css(w, 1, 1, true, coef, 1, &residuals) == Approx(sse).epsilon(1e-14));
    REQUIRE(residuals.size() == w.size());
    CHECK(residuals[4] == Approx(e[4]).epsilon(1e-14));
}
