#include "sensorcast/dps.hpp"

#include "sensorcast/error.hpp"
#include "sensorcast/evaluation.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <sstream>

namespace sensorcast::dps {

namespace {

class Writer {
public:
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u16(std::uint16_t v) { put(v, 2); }
    void u32(std::uint32_t v) { put(v, 4); }
    void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    void put(std::uint64_t v, int width) {
        for (int i = 0; i < width; ++i) {
            bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    std::vector<std::uint8_t> bytes_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
    std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    double f64() { return std::bit_cast<double>(get(8)); }
    bool done() const noexcept { return pos_ == bytes_.size(); }

private:
    std::uint64_t get(int width) {
        if (pos_ + static_cast<std::size_t>(width) > bytes_.size()) {
            throw ProtocolError("decode: message truncated");
        }
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i) {
            v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
        }
        return v;
    }
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

void write_model(Writer& w, const ForecastModel& model) {
    const std::size_t count = model.params.size() + model.state.size();
    if (count > 0xFFFF) {
        throw InvalidArgument("encode: model has too many values");
    }
    w.u8(static_cast<std::uint8_t>(model.kind));
    const auto& o = model.orders;
    w.u8(static_cast<std::uint8_t>((o.p & 3) << 4 | (o.d & 3) << 2 | (o.q & 3)));
    w.u16(static_cast<std::uint16_t>(count));
    for (double v : model.params) {
        w.f64(v);
    }
    for (double v : model.state) {
        w.f64(v);
    }
}

ForecastModel read_model(Reader& r) {
    const std::uint8_t kind = r.u8();
    if (kind > static_cast<std::uint8_t>(MethodKind::Arima)) {
        throw ProtocolError("decode: unknown model kind " + std::to_string(kind));
    }
    ForecastModel m;
    m.kind = static_cast<MethodKind>(kind);
    const std::uint8_t packed = r.u8();
    m.orders = {packed >> 4 & 3, packed >> 2 & 3, packed & 3};
    const std::uint16_t count = r.u16();
    const bool holt = m.kind == MethodKind::ExponentialSmoothing && count == 4;
    const std::size_t np = param_count(m.kind, m.orders, holt);
    const std::size_t ns = state_count(m.kind, m.orders, holt);
    if (np + ns != count) {
        throw ProtocolError("decode: value count " + std::to_string(count) +
                            " does not match the model layout");
    }
    m.params.resize(np);
    m.state.resize(ns);
    for (double& v : m.params) {
        v = r.f64();
    }
    for (double& v : m.state) {
        v = r.f64();
    }
    switch (m.kind) {
    case MethodKind::Constant:
    case MethodKind::Linear:
        m.k = 1;
        break;
    case MethodKind::SimpleMean:
        m.k = 2;
        break;
    case MethodKind::ExponentialSmoothing:
        m.k = holt ? 4 : 2;
        break;
    case MethodKind::Arima:
        m.k = m.orders.p + m.orders.q + (m.orders.d == 0 ? 1 : 0) + 1;
        break;
    }
    return m;
}

} // namespace

std::vector<std::uint8_t> encode(const DpsMessage& message) {
    Writer w;
    if (const auto* u = std::get_if<ModelUpdate>(&message)) {
        w.u8(kTagModelUpdate);
        w.u32(u->seq);
        write_model(w, u->model);
    } else {
        const auto& m = std::get<Measurement>(message);
        w.u8(kTagMeasurement);
        w.u32(m.seq);
        w.u32(m.index);
        w.f64(m.value);
    }
    return w.take();
}

DpsMessage decode(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    const std::uint8_t tag = r.u8();
    DpsMessage out;
    if (tag == kTagModelUpdate) {
        ModelUpdate u;
        u.seq = r.u32();
        u.model = read_model(r);
        out = std::move(u);
    } else if (tag == kTagMeasurement) {
        Measurement m;
        m.seq = r.u32();
        m.index = r.u32();
        m.value = r.f64();
        out = m;
    } else {
        throw ProtocolError("decode: unknown message tag " + std::to_string(tag));
    }
    if (!r.done()) {
        throw ProtocolError("decode: trailing bytes after message");
    }
    return out;
}

std::vector<std::uint8_t> encode_model(const ForecastModel& model) {
    Writer w;
    write_model(w, model);
    return w.take();
}

ForecastModel decode_model(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    ForecastModel m = read_model(r);
    if (!r.done()) {
        throw ProtocolError("decode_model: trailing bytes");
    }
    return m;
}

// ---------------------------------------------------------------------------

SensorNode::SensorNode(FitConfig config, std::size_t history, std::size_t window, double delta_min)
    : config_(std::move(config)), history_(history), window_(window), delta_min_(delta_min) {
    if (history_ < 1 || window_ < 1) {
        throw InvalidArgument("SensorNode: history and window must be at least 1");
    }
    if (!(delta_min_ > 0.0)) {
        throw InvalidArgument("SensorNode: delta_min must be positive");
    }
}

Measurement SensorNode::make_measurement(double value) {
    return Measurement{seq_++, index_, value};
}

ModelUpdate SensorNode::refit() {
    const std::vector<double> recent(buffer_.begin(), buffer_.end());
    try {
        model_ = fit(recent, config_);
    } catch (const Error&) {
        model_ = fit_constant(recent);
        ++fallbacks_;
    }
    forecasts_ = forecast(model_, window_);
    window_pos_ = 0;
    return ModelUpdate{seq_++, model_, false};
}

StepOutput SensorNode::bootstrap(double value) {
    if (bootstrapped_) {
        throw ProtocolError("SensorNode: bootstrap already complete");
    }
    StepOutput out;
    out.measurement = make_measurement(value);
    buffer_.push_back(value);
    ++index_;
    if (buffer_.size() == history_) {
        bootstrapped_ = true;
        if (config_.method == MethodKind::Constant) {
            constant_base_ = value;
        } else {
            out.update = refit();
            out.update->piggybacked = true;
        }
    }
    return out;
}

StepOutput SensorNode::step(double value) {
    if (!bootstrapped_) {
        throw ProtocolError("SensorNode: step before bootstrap completed");
    }
    const bool constant = config_.method == MethodKind::Constant;
    StepOutput out;
    last_forecast_ = constant ? constant_base_ : forecasts_[window_pos_];
    if (std::abs(last_forecast_ - value) >= delta_min_) {
        out.measurement = make_measurement(value);
        if (constant) {
            constant_base_ = value;
        }
    }
    buffer_.push_back(value);
    if (buffer_.size() > history_) {
        buffer_.pop_front();
    }
    ++index_;
    ++window_pos_;
    if (window_pos_ == window_) {
        window_pos_ = 0;
        if (!constant) {
            out.update = refit();
        }
    }
    return out;
}

Gateway::Gateway(MethodKind method, std::size_t window) : method_(method), window_(window) {
    if (window_ < 1) {
        throw InvalidArgument("Gateway: window must be at least 1");
    }
}

double Gateway::step(const std::optional<Measurement>& measurement) {
    const auto index = reconstructed_.size();
    const bool constant = method_ == MethodKind::Constant;
    const bool in_window = has_model_ && !constant;
    if (in_window && window_pos_ >= window_) {
        throw ProtocolError("Gateway: window exhausted without a model update at step " +
                            std::to_string(index));
    }
    if (in_window) {
        last_forecast_ = forecasts_[window_pos_];
    } else if (constant && has_model_) {
        last_forecast_ = constant_base_;
    }

    double value = 0.0;
    if (measurement) {
        if (measurement->index != index) {
            throw ProtocolError("Gateway: measurement index " + std::to_string(measurement->index) +
                                " outside the current step " + std::to_string(index));
        }
        value = measurement->value;
        if (constant) {
            constant_base_ = value;
            has_model_ = true;
        }
    } else {
        if (!has_model_) {
            throw ProtocolError("Gateway: no model established at step " + std::to_string(index));
        }
        value = last_forecast_;
    }
    if (in_window) {
        ++window_pos_;
    }
    reconstructed_.push_back(value);
    return value;
}

void Gateway::receive(const ModelUpdate& update) {
    model_ = update.model;
    forecasts_ = forecast(model_, window_);
    window_pos_ = 0;
    has_model_ = true;
}

// ---------------------------------------------------------------------------

DpsTrace run_dps(const TimeSeries& series, const FitConfig& method, std::size_t history,
                 std::size_t window, double delta_min) {
    series.validate();
    if (history < 1 || window < 1) {
        throw InvalidArgument("run_dps: history and window must be at least 1");
    }
    if (series.size() < history + window) {
        throw InvalidArgument("run_dps: series of length " + std::to_string(series.size()) +
                              " is shorter than history + window");
    }
    if (!(delta_min > 0.0)) {
        throw InvalidArgument("run_dps: delta_min must be positive");
    }

    SensorNode sensor(method, history, window, delta_min);
    Gateway gateway(method.method, window);
    DpsTrace trace;
    trace.bootstrap_steps = history;
    trace.post_bootstrap_steps = series.size() - history;
    trace.per_window_tx.assign((trace.post_bootstrap_steps + window - 1) / window, 0);
    trace.transmitted.reserve(series.size());

    // Lossless ordered channel: every message crosses the wire encoding.
    auto transmit = [&](const DpsMessage& message) {
        const auto bytes = encode(message);
        trace.wire_bytes += bytes.size();
        trace.messages.push_back(message);
        return decode(bytes);
    };
    auto deliver_step = [&](const StepOutput& out) {
        std::optional<Measurement> received;
        if (out.measurement) {
            received = std::get<Measurement>(transmit(*out.measurement));
        }
        gateway.step(received);
        trace.transmitted.push_back(out.measurement ? 1 : 0);
        if (out.update) {
            auto decoded = std::get<ModelUpdate>(transmit(*out.update));
            gateway.receive(decoded);
        }
    };

    for (std::size_t t = 0; t < history; ++t) {
        const std::size_t before = sensor.fallbacks();
        deliver_step(sensor.bootstrap(series.values[t]));
        if (sensor.fallbacks() != before) {
            trace.fallback_windows.push_back(0);
        }
    }
    for (std::size_t t = history; t < series.size(); ++t) {
        const std::size_t before = sensor.fallbacks();
        const StepOutput out = sensor.step(series.values[t]);
        deliver_step(out);
        if (gateway.last_forecast() != sensor.last_forecast()) {
            throw ProtocolError("run_dps: sensor and gateway forecasts diverged at step " +
                                std::to_string(t));
        }
        const std::size_t window_index = (t - history) / window;
        if (out.measurement) {
            ++trace.per_window_tx[window_index];
            ++trace.post_bootstrap_measurements;
        }
        if (sensor.fallbacks() != before) {
            trace.fallback_windows.push_back(window_index + 1);
        }
    }

    trace.reconstructed = series;
    trace.reconstructed.values = gateway.reconstructed();
    const auto steps = static_cast<double>(trace.post_bootstrap_steps);
    trace.saved_fraction =
        100.0 * (steps - static_cast<double>(trace.post_bootstrap_measurements)) / steps;
    return trace;
}

std::size_t count_model_overhead(const DpsTrace& trace) {
    std::size_t n = 0;
    for (const auto& m : trace.messages) {
        if (const auto* u = std::get_if<ModelUpdate>(&m); u && !u->piggybacked) {
            ++n;
        }
    }
    return n;
}

void write_trace_jsonl(const DpsTrace& trace, const std::filesystem::path& path,
                       const std::string& manifest_hash) {
    using nlohmann::ordered_json;
    std::ostringstream out;
    std::size_t updates = 0;
    for (const auto& m : trace.messages) {
        updates += std::holds_alternative<ModelUpdate>(m) ? 1 : 0;
    }
    ordered_json header = {
        {"type", "summary"},
        {"manifest_hash", manifest_hash},
        {"steps", trace.reconstructed.size()},
        {"bootstrap_steps", trace.bootstrap_steps},
        {"post_bootstrap_steps", trace.post_bootstrap_steps},
        {"post_bootstrap_measurements", trace.post_bootstrap_measurements},
        {"model_updates", updates},
        {"model_overhead", count_model_overhead(trace)},
        {"saved_fraction", trace.saved_fraction},
        {"wire_bytes", trace.wire_bytes},
        {"per_window_tx", trace.per_window_tx},
        {"fallback_windows", trace.fallback_windows},
    };
    out << header.dump() << '\n';
    for (const auto& m : trace.messages) {
        ordered_json line;
        if (const auto* u = std::get_if<ModelUpdate>(&m)) {
            line = {{"type", "model_update"},
                    {"seq", u->seq},
                    {"kind", method_name(u->model.kind)},
                    {"orders", {u->model.orders.p, u->model.orders.d, u->model.orders.q}},
                    {"params", u->model.params},
                    {"state", u->model.state},
                    {"piggybacked", u->piggybacked},
                    {"bytes", encode(m).size()}};
        } else {
            const auto& meas = std::get<Measurement>(m);
            line = {{"type", "measurement"},
                    {"seq", meas.seq},
                    {"index", meas.index},
                    {"value", meas.value}};
        }
        out << line.dump() << '\n';
    }
    for (std::size_t t = 0; t < trace.reconstructed.size(); ++t) {
        ordered_json line = {{"type", "step"},
                             {"t", t},
                             {"reconstructed", trace.reconstructed.values[t]},
                             {"transmitted", trace.transmitted[t] != 0}};
        out << line.dump() << '\n';
    }
    eval::write_file_atomic(path, out.str());
}

} // namespace sensorcast::dps
