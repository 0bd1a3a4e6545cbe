#include "sensorcast/datasets.hpp"
#include "sensorcast/dps.hpp"
#include "sensorcast/evaluation.hpp"
#include "sensorcast/ring.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>

using namespace sensorcast;

TEST_CASE("generate, reload, simulate and evaluate") {
    const auto dir = std::filesystem::temp_directory_path() / "sensorcast_pipeline";
    std::filesystem::create_directories(dir);
    auto p = data::standard_ball_configs(31)[1];
    p.n = 900;
    const auto generated = data::generate_ball(p);
    data::write_ball_csv(generated, dir / "ball.csv");

    const auto desc = data::DatasetDescriptor::for_family(data::Family::Ball, 2);
    const auto series = data::load_csv(dir / "ball.csv", desc);
    REQUIRE(series.values == generated.values);

    const auto trace = dps::run_dps(series, FitConfig::for_method(MethodKind::Arima), 100, 20, desc.delta_min);
    for (std::size_t i = 0; i < series.size(); ++i) {
        CHECK(std::abs(trace.reconstructed.values[i] - series.values[i]) < desc.delta_min);
    }
    const auto projected = ring::network_savings({5, 3}, trace.saved_fraction);
    CHECK(projected == static_cast<std::uint64_t>(std::floor(110.0 * trace.saved_fraction / 100.0)));

    std::vector<eval::GridJob> jobs;
    for (auto k : {MethodKind::Constant, MethodKind::ExponentialSmoothing, MethodKind::Arima}) {
        eval::Scenario sc;
        sc.descriptor = desc;
        sc.method = FitConfig::for_method(k);
        sc.history = 100;
        sc.window = 20;
        sc.n_splits = 20;
        sc.seed = 4;
        jobs.push_back({sc, &series});
    }
    const auto rows = eval::run_grid(jobs, 0);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(r.saved_pct >= 0.0);
        CHECK(r.saved_pct <= 100.0);
        CHECK(std::isfinite(r.mape_mean));
    }
    eval::emit_report(rows, dir / "report.json", dir / "report.csv", "0");
    CHECK(std::filesystem::file_size(dir / "report.csv") > 0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("interpolated gaps flow through to DPS") {
    TimeSeries raw;
    for (int i = 0; i < 200; ++i) {
        if (i % 17 == 5) {
            continue;
        }
        raw.timestamps.push_back(30.0 * i);
        raw.values.push_back(20.0 + std::sin(i / 10.0));
    }
    const auto filled = add_white_noise(interpolate_gaps(raw, 30.0), 0.01, 1);
    REQUIRE(filled.size() == 200);
    const auto trace = dps::run_dps(filled, FitConfig::for_method(MethodKind::ExponentialSmoothing), 50, 10, 0.01);
    CHECK(trace.post_bootstrap_steps == 150);
}
