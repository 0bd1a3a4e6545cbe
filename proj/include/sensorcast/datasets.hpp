#pragma once

#include "sensorcast/series.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sensorcast::data {

enum class Family {
    Intel,
    Sensorscope,
    Ball,
    RunningLatitude,
    RunningLongitude,
};

std::string_view family_name(Family family) noexcept;
/// "intel", "sensorscope", "ball", "running_latitude", "running_longitude".
Family parse_family(std::string_view name);

/// Acceptance threshold equal to the sensor resolution of each family.
double builtin_threshold(Family family);
double default_period(Family family);
std::string_view family_unit(Family family);

struct DatasetDescriptor {
    Family family = Family::Ball;
    int group = 1;
    double delta_min = 0.0;
    double expected_period = 0.0;
    /// Mote / station to keep when the file holds several. Required if it does.
    std::optional<std::string> sensor_id;
    /// Noise added to interpolated points (sigma = delta_min).
    std::uint64_t noise_seed = 0;
    bool noise_all_values = false;

    /// Descriptor with the family's builtin threshold and period.
    static DatasetDescriptor for_family(Family family, int group = 1);
    void validate() const;
};

struct BallParams {
    double theta0 = 50.0;
    double lambda = 0.1;
    double gamma = 0.05;
    std::size_t n = 2800;
    double dt = 1.0;
    std::uint64_t seed = 0;
    /// Drops the Gaussian term; for analytic checks.
    bool suppress_noise = false;

    void validate() const;
};

/// theta0 |cos(2 pi lambda t)| / e^{gamma t}, without noise.
double ball_signal(const BallParams& p, double t);

/// n samples at t = k dt of ball_signal plus i.i.d. standard normal noise.
TimeSeries generate_ball(const BallParams& p);

/// The three published configurations (group 1..3), 2800 points each.
std::vector<BallParams> standard_ball_configs(std::uint64_t seed = 0);

/**
 * Loads a CSV file in the family's layout:
 *   Intel        epoch,moteid,temperature
 *   Sensorscope  station,epoch,temperature
 *   Running      timestamp,latitude,longitude
 *   Ball         time,position
 * Rows are sorted by time, duplicate timestamps keep the last row, gaps are
 * interpolated and the interpolated points receive white noise.
 */
TimeSeries load_csv(const std::filesystem::path& path, const DatasetDescriptor& descriptor);

/// Writes a series in the Ball layout (time,position).
void write_ball_csv(const TimeSeries& series, const std::filesystem::path& path);

} // namespace sensorcast::data
