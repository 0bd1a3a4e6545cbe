#include "oracles.hpp"

#include "sensorcast/error.hpp"
#include "sensorcast/forecast.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

using namespace sensorcast;
using Catch::Approx;

namespace {

std::vector<double> run(const std::vector<double>& h, MethodKind kind, std::size_t w) {
    return forecast(fit(h, FitConfig::for_method(kind)), w);
}

FitConfig arima_with(std::vector<ArimaOrder> grid) {
    auto c = FitConfig::for_method(MethodKind::Arima);
    c.order_grid = std::move(grid);
    return c;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

constexpr MethodKind kAll[] = {MethodKind::Constant, MethodKind::Linear, MethodKind::SimpleMean,
                               MethodKind::ExponentialSmoothing, MethodKind::Arima};

} // namespace

TEST_CASE("method names round-trip") {
    for (auto k : kAll) {
        CHECK(parse_method(method_name(k)) == k);
    }
    CHECK_THROWS_AS(parse_method("neural"), InvalidArgument);
}

TEST_CASE("Constant repeats the last value") {
    CHECK(run({1, 2, 3}, MethodKind::Constant, 2) == std::vector<double>{3, 3});
    CHECK(run({5}, MethodKind::Constant, 1) == std::vector<double>{5});
    CHECK(run({-2.5, 0.0}, MethodKind::Constant, 3) == std::vector<double>{0, 0, 0});
    CHECK(run({3}, MethodKind::Constant, 4) == std::vector<double>{3, 3, 3, 3});
    CHECK_THROWS(fit_constant({}));
}

TEST_CASE("Linear extends the last two points") {
    CHECK(run({2, 4}, MethodKind::Linear, 3) == std::vector<double>{6, 8, 10});
    CHECK(run({7, 7}, MethodKind::Linear, 2) == std::vector<double>{7, 7});
    CHECK(run({0, -1}, MethodKind::Linear, 2) == std::vector<double>{-2, -3});
    CHECK(run({2, 4}, MethodKind::Linear, 1) == std::vector<double>{6});
    CHECK_THROWS(fit_linear(std::vector<double>{1}));
}

TEST_CASE("Linear is exact on affine input") {
    std::vector<double> h(30);
    for (std::size_t t = 0; t < h.size(); ++t) {
        h[t] = 1.5 - 0.25 * static_cast<double>(t);
    }
    const auto f = run(h, MethodKind::Linear, 50);
    for (std::size_t i = 0; i < f.size(); ++i) {
        CHECK(std::abs(f[i] - (1.5 - 0.25 * static_cast<double>(30 + i))) < 1e-9);
    }
}

TEST_CASE("SimpleMean forecasts the history mean") {
    CHECK(run({1, 2, 3}, MethodKind::SimpleMean, 2) == std::vector<double>{2, 2});
    CHECK(run({4.25, 4.25, 4.25}, MethodKind::SimpleMean, 3) == std::vector<double>{4.25, 4.25, 4.25});
    CHECK(run({1, 2, 3, 4, 10}, MethodKind::SimpleMean, 1) == std::vector<double>{4});
    CHECK_THROWS(fit_simple_mean({}));
}

TEST_CASE("ES with alpha forced to 1 matches Constant") {
    auto cfg = FitConfig::for_method(MethodKind::ExponentialSmoothing);
    cfg.es_variants.holt = false;
    cfg.es_alpha_grid = {1.0};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto h = oracle::random_walk(40, seed);
        CHECK(max_abs_diff(forecast(fit(h, cfg), 7), run(h, MethodKind::Constant, 7)) < 1e-9);
    }
}

TEST_CASE("ES keeps a constant history constant") {
    const std::vector<double> h(30, 12.5);
    for (double v : run(h, MethodKind::ExponentialSmoothing, 6)) {
        CHECK(v == Approx(12.5).margin(1e-12));
    }
}

TEST_CASE("ES picks Holt on an exact line") {
    std::vector<double> h(50);
    std::iota(h.begin(), h.end(), 1.0);
    const auto m = fit_es(h, FitConfig::for_method(MethodKind::ExponentialSmoothing));
    CHECK(m.is_holt());

    // Hand-rolled Holt recursion with the fitted smoothing parameters.
    const double a = m.params[0];
    const double b = m.params[1];
    double level = h[0];
    double trend = h[1] - h[0];
    for (std::size_t t = 1; t < h.size(); ++t) {
        const double prev = level;
        level = a * h[t] + (1 - a) * (level + trend);
        trend = b * (level - prev) + (1 - b) * trend;
    }
    const auto f = forecast(m, 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(std::abs(f[i] - (51.0 + static_cast<double>(i))) < 1e-6);
        CHECK(std::abs(f[i] - (level + static_cast<double>(i + 1) * trend)) < 1e-9);
    }
}

TEST_CASE("ES needs four points and stays inside the parameter box") {
    CHECK_THROWS(fit_es(std::vector<double>{1, 2, 3}, FitConfig::for_method(MethodKind::ExponentialSmoothing)));
    const auto h = oracle::random_walk(80, 9);
    const auto m = fit_es(h, FitConfig::for_method(MethodKind::ExponentialSmoothing));
    for (double p : m.params) {
        CHECK(p >= 0.01);
        CHECK(p <= 0.99);
    }
}

TEST_CASE("ARIMA(0,1,0) is the Constant forecast") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto h = oracle::random_walk(50, seed);
        CHECK(max_abs_diff(forecast(fit(h, arima_with({{0, 1, 0}})), 9), run(h, MethodKind::Constant, 9)) < 1e-9);
    }
}

TEST_CASE("ARIMA(0,0,0) is the SimpleMean forecast") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto h = oracle::random_walk(50, seed);
        CHECK(max_abs_diff(forecast(fit(h, arima_with({{0, 0, 0}})), 9), run(h, MethodKind::SimpleMean, 9)) < 1e-9);
    }
}

TEST_CASE("ARIMA recovers an AR(1) coefficient") {
    const auto x = oracle::ar1(500, 0.8, 77);
    const auto m = fit(x, arima_with({{1, 0, 0}}));
    REQUIRE(m.orders == ArimaOrder{1, 0, 0});
    CHECK(std::abs(m.params[0] - oracle::yule_walker_ar1(x)) <= 0.15);
    CHECK(std::abs(m.params[0] - 0.8) <= 0.15);

    const auto sel = fit(x, FitConfig::for_method(MethodKind::Arima));
    CHECK(sel.orders.d == 0);
    CHECK(sel.orders.p >= 1);
}

TEST_CASE("ARIMA refuses a short history") {
    const auto h = oracle::random_walk(11, 1);
    CHECK_THROWS(fit_arima(h, FitConfig::for_method(MethodKind::Arima)));
    CHECK(min_history(FitConfig::for_method(MethodKind::Arima)) == 12);
    CHECK(min_history(arima_with({{1, 0, 0}})) == 11);
}

TEST_CASE("ARIMA state fits the space bound") {
    const auto h = oracle::random_walk(120, 4);
    for (const auto& o : full_arima_grid()) {
        const auto m = fit(h, arima_with({o}));
        CHECK(m.params.size() == param_count(MethodKind::Arima, m.orders, false));
        CHECK(m.state.size() == state_count(MethodKind::Arima, m.orders, false));
        CHECK(m.state.size() <= static_cast<std::size_t>(std::max(m.orders.p, m.orders.q + 1) + m.orders.d + m.orders.q));
    }
}

TEST_CASE("differencing helpers") {
    CHECK(arima_detail::difference(std::vector<double>{1, 4, 9, 16}, 1) == std::vector<double>{3, 5, 7});
    CHECK(arima_detail::difference(std::vector<double>{1, 4, 9, 16}, 2) == std::vector<double>{2, 2});
    const auto walk = oracle::random_walk(400, 5);
    const int allowed[] = {0, 1, 2};
    CHECK(arima_detail::choose_differencing(walk, allowed) >= 1);
    const auto stationary = oracle::ar1(400, 0.5, 5);
    CHECK(arima_detail::choose_differencing(stationary, allowed) == 0);
}

TEST_CASE("admissibility rejects unit and explosive roots") {
    const double ok[] = {0.5};
    const double unit[] = {1.0};
    const double explosive[] = {1.2};
    const double none[] = {0.0};
    CHECK(arima_detail::admissible(ok, {}));
    CHECK_FALSE(arima_detail::admissible(unit, {}));
    CHECK_FALSE(arima_detail::admissible(explosive, {}));
    CHECK_FALSE(arima_detail::admissible({}, unit));
    CHECK(arima_detail::admissible(none, ok));
    // AR(2) with complex roots of modulus 1/sqrt(0.81) > 1.
    const double ar2[] = {0.0, -0.81};
    CHECK(arima_detail::admissible(ar2, {}));
    const double ar2_bad[] = {0.0, -1.0};
    CHECK_FALSE(arima_detail::admissible(ar2_bad, {}));
}

TEST_CASE("AICc formula") {
    CHECK(aicc(0.0, 0, 10) == 0.0);
    CHECK(aicc(20.0, 2, 20) == Approx(20.0 + 4.0 + 12.0 / 17.0).epsilon(1e-15));
    CHECK(aicc(20.0, 2, 20) == Approx(24.70588).margin(1e-5));
    CHECK(aicc(0.0, 3, 1000000) - 6.0 < 1e-3);
    CHECK_THROWS_AS(aicc(1.0, 3, 4), InvalidArgument);
    CHECK_THROWS_AS(aicc(1.0, 3, 3), InvalidArgument);
}

TEST_CASE("forecast rejects a zero horizon and keeps prefixes") {
    const auto h = oracle::random_walk(60, 8);
    for (auto k : kAll) {
        const auto m = fit(h, FitConfig::for_method(k));
        CHECK_THROWS_AS(forecast(m, 0), InvalidArgument);
        const auto ten = forecast(m, 10);
        const auto five = forecast(m, 5);
        CHECK(std::equal(five.begin(), five.end(), ten.begin()));
    }
}

TEST_CASE("fits are deterministic") {
    const auto h = oracle::random_walk(100, 13);
    for (auto k : kAll) {
        const auto a = fit(h, FitConfig::for_method(k));
        const auto b = fit(h, FitConfig::for_method(k));
        CHECK(a.params == b.params);
        CHECK(a.state == b.state);
        CHECK(a.orders == b.orders);
    }
}

TEST_CASE("simple methods are scale equivariant") {
    const auto h = oracle::random_walk(25, 21);
    for (auto k : {MethodKind::Constant, MethodKind::Linear, MethodKind::SimpleMean}) {
        for (double c : {-3.0, 0.5, 1000.0}) {
            std::vector<double> scaled(h);
            for (auto& v : scaled) {
                v *= c;
            }
            const auto base = run(h, k, 6);
            const auto f = run(scaled, k, 6);
            for (std::size_t i = 0; i < f.size(); ++i) {
                CHECK(f[i] == Approx(c * base[i]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("select_model") {
    const auto h = oracle::random_walk(60, 2);
    SECTION("single candidate") {
        const FitConfig one[] = {FitConfig::for_method(MethodKind::Linear)};
        const auto m = select_model(h, one);
        CHECK(m.kind == MethodKind::Linear);
        CHECK(m.params == fit_linear(h).params);
    }
    SECTION("constant series prefers fewer parameters") {
        const std::vector<double> flat(40, 2.0);
        const FitConfig cands[] = {arima_with({{2, 0, 2}}), arima_with({{0, 0, 0}})};
        const auto m = select_model(flat, cands);
        CHECK(m.orders == ArimaOrder{0, 0, 0});
    }
    SECTION("skips candidates that cannot fit") {
        const std::vector<double> tiny{1.0, 2.0, 3.0};
        const FitConfig cands[] = {FitConfig::for_method(MethodKind::Arima), FitConfig::for_method(MethodKind::Constant)};
        CHECK(select_model(tiny, cands).kind == MethodKind::Constant);
        const FitConfig only_arima[] = {FitConfig::for_method(MethodKind::Arima)};
        CHECK_THROWS_AS(select_model(tiny, only_arima), DataError);
    }
    SECTION("AR(1) with the full grid keeps d = 0") {
        const auto x = oracle::ar1(500, 0.8, 99);
        const FitConfig cands[] = {FitConfig::for_method(MethodKind::Arima)};
        CHECK(select_model(x, cands).orders.d == 0);
    }
}

TEST_CASE("optimizer budget bounds") {
    auto cfg = FitConfig::for_method(MethodKind::Arima);
    const auto h = oracle::random_walk(80, 3);
    cfg.optimizer_budget = 0;
    CHECK_THROWS_AS(fit(h, cfg), InvalidArgument);
    cfg.optimizer_budget = 11;
    CHECK_THROWS_AS(fit(h, cfg), InvalidArgument);
    cfg.optimizer_budget = 1;
    CHECK_NOTHROW(fit(h, cfg));
}
