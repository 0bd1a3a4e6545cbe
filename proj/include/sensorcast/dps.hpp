#pragma once

#include "sensorcast/forecast.hpp"
#include "sensorcast/series.hpp"

#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace sensorcast::dps {

struct ModelUpdate {
    std::uint32_t seq = 0;
    ForecastModel model;
    /// Attached to the last bootstrap measurement rather than sent on its own.
    bool piggybacked = false;
};

struct Measurement {
    std::uint32_t seq = 0;
    std::uint32_t index = 0;
    double value = 0.0;
};

using DpsMessage = std::variant<ModelUpdate, Measurement>;

inline constexpr std::uint8_t kTagModelUpdate = 0;
inline constexpr std::uint8_t kTagMeasurement = 1;

/**
 * Wire layout, little-endian:
 *   u8 tag
 *   ModelUpdate: u32 seq, u8 kind, u8 orders (p<<4 | d<<2 | q), u16 count,
 *                count x f64 (params followed by state)
 *   Measurement: u32 seq, u32 index, f64 value
 * The piggyback flag is link-level bookkeeping and is not encoded.
 */
std::vector<std::uint8_t> encode(const DpsMessage& message);
DpsMessage decode(std::span<const std::uint8_t> bytes);

/// Model payload alone (kind, orders, count, values), shared with encode().
std::vector<std::uint8_t> encode_model(const ForecastModel& model);
ForecastModel decode_model(std::span<const std::uint8_t> bytes);

struct StepOutput {
    std::optional<Measurement> measurement;
    std::optional<ModelUpdate> update;
};

/**
 * Sensor side. Holds the last H readings and the model currently shared with
 * the gateway. Forecasts for a window are computed once, at fit time.
 */
class SensorNode {
public:
    SensorNode(FitConfig config, std::size_t history, std::size_t window, double delta_min);

    /// Bootstrap reading: always transmitted. The last one triggers the first fit,
    /// whose ModelUpdate is marked piggybacked.
    StepOutput bootstrap(double value);

    /// Regular reading after bootstrap.
    StepOutput step(double value);

    bool bootstrapped() const noexcept { return bootstrapped_; }
    std::size_t window_pos() const noexcept { return window_pos_; }
    const std::deque<double>& buffer() const noexcept { return buffer_; }
    const ForecastModel& model() const noexcept { return model_; }
    /// Forecast the sensor used for the most recent step().
    double last_forecast() const noexcept { return last_forecast_; }
    std::size_t fallbacks() const noexcept { return fallbacks_; }
    std::uint32_t steps_seen() const noexcept { return index_; }

private:
    Measurement make_measurement(double value);
    ModelUpdate refit();

    FitConfig config_;
    std::size_t history_;
    std::size_t window_;
    double delta_min_;
    std::deque<double> buffer_;
    ForecastModel model_;
    std::vector<double> forecasts_;
    std::size_t window_pos_ = 0;
    bool bootstrapped_ = false;
    double constant_base_ = 0.0;
    double last_forecast_ = 0.0;
    std::uint32_t seq_ = 0;
    std::uint32_t index_ = 0;
    std::size_t fallbacks_ = 0;
};

/// Gateway side: reconstructs the series from forecasts and corrections.
class Gateway {
public:
    Gateway(MethodKind method, std::size_t window);

    /// One time step. Measurement overrides the forecast; its index must be the
    /// current step. Throws ProtocolError otherwise or when no model is established
    /// outside bootstrap.
    double step(const std::optional<Measurement>& measurement);

    /// Replaces the model and resets the window position.
    void receive(const ModelUpdate& update);

    bool has_model() const noexcept { return has_model_; }
    std::size_t window_pos() const noexcept { return window_pos_; }
    const std::vector<double>& reconstructed() const noexcept { return reconstructed_; }
    /// Forecast used for the most recent step (meaningless during bootstrap).
    double last_forecast() const noexcept { return last_forecast_; }

private:
    MethodKind method_;
    std::size_t window_;
    ForecastModel model_;
    std::vector<double> forecasts_;
    bool has_model_ = false;
    std::size_t window_pos_ = 0;
    double constant_base_ = 0.0;
    double last_forecast_ = 0.0;
    std::vector<double> reconstructed_;
};

struct DpsTrace {
    TimeSeries reconstructed;
    std::vector<DpsMessage> messages;
    /// Measurement messages per post-bootstrap window.
    std::vector<std::size_t> per_window_tx;
    std::vector<std::uint8_t> transmitted;
    std::size_t bootstrap_steps = 0;
    std::size_t post_bootstrap_steps = 0;
    std::size_t post_bootstrap_measurements = 0;
    /// Windows where fitting failed and a Constant model was shipped instead.
    std::vector<std::size_t> fallback_windows;
    double saved_fraction = 0.0; ///< percent of post-bootstrap steps with no transmission
    std::size_t wire_bytes = 0;
};

/**
 * Drives a sensor and a gateway in lockstep over a lossless, ordered channel.
 * Throws InvalidArgument when the series is shorter than history + window or
 * delta_min is not positive.
 */
DpsTrace run_dps(const TimeSeries& series, const FitConfig& method, std::size_t history,
                 std::size_t window, double delta_min);

/// ModelUpdate messages that cost a transmission of their own.
std::size_t count_model_overhead(const DpsTrace& trace);

/// One JSON object per line: a header line with the summary, then one line per message.
void write_trace_jsonl(const DpsTrace& trace, const std::filesystem::path& path,
                       const std::string& manifest_hash);

} // namespace sensorcast::dps
