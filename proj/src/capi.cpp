#include "sensorcast/sensorcast.h"

#include "sensorcast/datasets.hpp"
#include "sensorcast/dps.hpp"
#include "sensorcast/error.hpp"
#include "sensorcast/evaluation.hpp"
#include "sensorcast/forecast.hpp"
#include "sensorcast/ring.hpp"
#include "sensorcast/series.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <new>
#include <string>

using namespace sensorcast;

struct sc_series {
    std::shared_ptr<const TimeSeries> series;
};

struct sc_model {
    ForecastModel model;
};

struct sc_dps_trace {
    dps::DpsTrace trace;
    std::vector<double> actual;
};

struct sc_evaluation {
    std::vector<std::shared_ptr<const TimeSeries>> series;
    std::vector<eval::Scenario> scenarios;
    std::vector<eval::ScenarioRow> rows;
};

namespace {

thread_local std::string g_last_error;

sc_status fail(sc_status status, std::string message) {
    g_last_error = std::move(message);
    return status;
}

sc_status status_of(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument:
        return SC_ERR_INVALID_ARGUMENT;
    case ErrorKind::Data:
        return SC_ERR_DATA;
    case ErrorKind::Io:
        return SC_ERR_IO;
    case ErrorKind::Numeric:
        return SC_ERR_NUMERIC;
    case ErrorKind::Protocol:
        return SC_ERR_PROTOCOL;
    }
    return SC_ERR_INTERNAL;
}

template <typename F>
sc_status guarded(F&& body) noexcept {
    try {
        g_last_error.clear();
        body();
        return SC_OK;
    } catch (const Error& e) {
        return fail(status_of(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(SC_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SC_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SC_ERR_INTERNAL, "unknown error");
    }
}

template <typename T>
void require(const T* p, const char* what) {
    if (p == nullptr) {
        throw InvalidArgument(std::string(what) + " must not be NULL");
    }
}

FitConfig to_config(const sc_fit_config* c) {
    require(c, "fit config");
    if (c->method < SC_METHOD_CONSTANT || c->method > SC_METHOD_ARIMA) {
        throw InvalidArgument("fit config: unknown method");
    }
    FitConfig config = FitConfig::for_method(static_cast<MethodKind>(c->method));
    if (c->optimizer_budget != 0) {
        config.optimizer_budget = c->optimizer_budget;
    }
    if (c->orders != nullptr) {
        for (std::size_t i = 0; i < c->n_orders; ++i) {
            config.order_grid.push_back({c->orders[3 * i], c->orders[3 * i + 1], c->orders[3 * i + 2]});
        }
    }
    config.es_variants.simple = c->es_simple != 0;
    config.es_variants.holt = c->es_holt != 0;
    return config;
}

data::DatasetDescriptor to_descriptor(const sc_dataset_desc* d) {
    require(d, "dataset descriptor");
    if (d->family < SC_FAMILY_INTEL || d->family > SC_FAMILY_RUNNING_LONGITUDE) {
        throw InvalidArgument("dataset descriptor: unknown family");
    }
    auto desc = data::DatasetDescriptor::for_family(static_cast<data::Family>(d->family), d->group);
    if (d->delta_min > 0.0) {
        desc.delta_min = d->delta_min;
    }
    if (d->expected_period > 0.0) {
        desc.expected_period = d->expected_period;
    }
    if (d->sensor_id != nullptr) {
        desc.sensor_id = std::string(d->sensor_id);
    }
    desc.noise_seed = d->noise_seed;
    desc.noise_all_values = d->noise_all_values != 0;
    return desc;
}

template <typename Fill>
void write_buffer(std::size_t needed, void* buf, std::size_t capacity, std::size_t* len, Fill fill) {
    require(len, "len");
    *len = needed;
    if (buf == nullptr) {
        return;
    }
    if (capacity < needed) {
        throw InvalidArgument("buffer too small: need " + std::to_string(needed) + " bytes");
    }
    fill();
}

} // namespace

extern "C" {

const char* sc_version(void) { return SENSORCAST_VERSION; }

const char* sc_last_error(void) { return g_last_error.c_str(); }

sc_status sc_method_from_name(const char* name, sc_method* out) {
    return guarded([&] {
        require(name, "name");
        require(out, "out");
        *out = static_cast<sc_method>(parse_method(name));
    });
}

const char* sc_method_name(sc_method method) {
    if (method < SC_METHOD_CONSTANT || method > SC_METHOD_ARIMA) {
        return "unknown";
    }
    return method_name(static_cast<MethodKind>(method)).data();
}

sc_status sc_family_from_name(const char* name, sc_family* out) {
    return guarded([&] {
        require(name, "name");
        require(out, "out");
        *out = static_cast<sc_family>(data::parse_family(name));
    });
}

const char* sc_family_name(sc_family family) {
    if (family < SC_FAMILY_INTEL || family > SC_FAMILY_RUNNING_LONGITUDE) {
        return "unknown";
    }
    return data::family_name(static_cast<data::Family>(family)).data();
}

sc_status sc_builtin_threshold(sc_family family, double* out) {
    return guarded([&] {
        require(out, "out");
        if (family < SC_FAMILY_INTEL || family > SC_FAMILY_RUNNING_LONGITUDE) {
            throw InvalidArgument("builtin_threshold: unknown family");
        }
        *out = data::builtin_threshold(static_cast<data::Family>(family));
    });
}

uint64_t sc_fnv1a64(const void* data, size_t len) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

// ---- series ---------------------------------------------------------------

sc_status sc_ball_standard_params(int group, uint64_t seed, sc_ball_params* out) {
    return guarded([&] {
        require(out, "out");
        if (group < 1 || group > 3) {
            throw InvalidArgument("Ball group must be 1, 2 or 3");
        }
        const auto p = data::standard_ball_configs(seed)[static_cast<std::size_t>(group - 1)];
        *out = {p.theta0, p.lambda, p.gamma, p.n, p.dt, p.seed, 0};
    });
}

sc_status sc_series_generate_ball(const sc_ball_params* params, sc_series** out) {
    return guarded([&] {
        require(params, "params");
        require(out, "out");
        data::BallParams p;
        p.theta0 = params->theta0;
        p.lambda = params->lambda;
        p.gamma = params->gamma;
        p.n = params->n;
        p.dt = params->dt;
        p.seed = params->seed;
        p.suppress_noise = params->suppress_noise != 0;
        *out = new sc_series{std::make_shared<const TimeSeries>(data::generate_ball(p))};
    });
}

sc_status sc_series_from_values(const double* values, size_t n, double period, sc_series** out) {
    return guarded([&] {
        require(out, "out");
        if (n > 0) {
            require(values, "values");
        }
        if (!(period > 0.0)) {
            throw InvalidArgument("period must be positive");
        }
        auto s = TimeSeries::from_values(std::vector<double>(values, values + n), period);
        s.validate();
        *out = new sc_series{std::make_shared<const TimeSeries>(std::move(s))};
    });
}

sc_status sc_series_load_csv(const char* path, const sc_dataset_desc* desc, sc_series** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new sc_series{std::make_shared<const TimeSeries>(data::load_csv(path, to_descriptor(desc)))};
    });
}

sc_status sc_series_write_ball_csv(const sc_series* series, const char* path) {
    return guarded([&] {
        require(series, "series");
        require(path, "path");
        data::write_ball_csv(*series->series, path);
    });
}

size_t sc_series_length(const sc_series* series) { return series ? series->series->size() : 0; }

sc_status sc_series_copy_values(const sc_series* series, double* out, size_t capacity) {
    return guarded([&] {
        require(series, "series");
        require(out, "out");
        const auto& v = series->series->values;
        if (capacity < v.size()) {
            throw InvalidArgument("output buffer holds fewer values than the series");
        }
        std::copy(v.begin(), v.end(), out);
    });
}

sc_status sc_series_quantize(const sc_series* series, double resolution, sc_series** out) {
    return guarded([&] {
        require(series, "series");
        require(out, "out");
        *out = new sc_series{
            std::make_shared<const TimeSeries>(quantize_to_resolution(*series->series, resolution))};
    });
}

sc_status sc_calibrate_resolution(const sc_series* series, double target, double* out) {
    return guarded([&] {
        require(series, "series");
        require(out, "out");
        *out = eval::calibrate_resolution(series->series->values, target);
    });
}

void sc_series_free(sc_series* series) { delete series; }

// ---- models ---------------------------------------------------------------

void sc_fit_config_default(sc_method method, sc_fit_config* out) {
    if (out != nullptr) {
        *out = sc_fit_config{method, 0, nullptr, 0, 1, 1};
    }
}

sc_status sc_model_fit(const sc_fit_config* config, const double* history, size_t n, sc_model** out) {
    return guarded([&] {
        require(out, "out");
        require(history, "history");
        *out = new sc_model{fit(std::span<const double>(history, n), to_config(config))};
    });
}

sc_status sc_model_forecast(const sc_model* model, size_t horizon, double* out) {
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        const auto f = forecast(model->model, horizon);
        std::copy(f.begin(), f.end(), out);
    });
}

sc_status sc_model_encode(const sc_model* model, uint8_t* buf, size_t capacity, size_t* len) {
    return guarded([&] {
        require(model, "model");
        const auto bytes = dps::encode_model(model->model);
        write_buffer(bytes.size(), buf, capacity, len,
                     [&] { std::memcpy(buf, bytes.data(), bytes.size()); });
    });
}

sc_status sc_model_decode(const uint8_t* buf, size_t len, sc_model** out) {
    return guarded([&] {
        require(buf, "buf");
        require(out, "out");
        *out = new sc_model{dps::decode_model(std::span<const std::uint8_t>(buf, len))};
    });
}

sc_status sc_model_to_json(const sc_model* model, char* buf, size_t capacity, size_t* len) {
    return guarded([&] {
        require(model, "model");
        const auto& m = model->model;
        const nlohmann::ordered_json j = {
            {"kind", method_name(m.kind)},
            {"orders", {m.orders.p, m.orders.d, m.orders.q}},
            {"params", m.params},
            {"state", m.state},
            {"k", m.k},
            {"fit_n", m.fit_n},
        };
        const std::string text = j.dump();
        write_buffer(text.size() + 1, buf, capacity, len,
                     [&] { std::memcpy(buf, text.c_str(), text.size() + 1); });
    });
}

void sc_model_free(sc_model* model) { delete model; }

// ---- dps ------------------------------------------------------------------

sc_status sc_dps_run(const sc_series* series, const sc_fit_config* config, size_t history,
                     size_t window, double delta_min, sc_dps_trace** out) {
    return guarded([&] {
        require(series, "series");
        require(out, "out");
        auto trace = dps::run_dps(*series->series, to_config(config), history, window, delta_min);
        *out = new sc_dps_trace{std::move(trace), series->series->values};
    });
}

sc_status sc_dps_summary_get(const sc_dps_trace* trace, sc_dps_summary* out) {
    return guarded([&] {
        require(trace, "trace");
        require(out, "out");
        const auto& t = trace->trace;
        std::size_t updates = 0;
        for (const auto& m : t.messages) {
            updates += std::holds_alternative<dps::ModelUpdate>(m) ? 1 : 0;
        }
        double max_err = 0.0;
        for (std::size_t i = 0; i < trace->actual.size(); ++i) {
            max_err = std::max(max_err, std::abs(t.reconstructed.values[i] - trace->actual[i]));
        }
        *out = sc_dps_summary{t.reconstructed.size(),
                              t.bootstrap_steps,
                              t.post_bootstrap_steps,
                              t.post_bootstrap_measurements,
                              updates,
                              dps::count_model_overhead(t),
                              t.fallback_windows.size(),
                              t.wire_bytes,
                              t.saved_fraction,
                              max_err};
    });
}

sc_status sc_dps_write_jsonl(const sc_dps_trace* trace, const char* path, const char* manifest_hash) {
    return guarded([&] {
        require(trace, "trace");
        require(path, "path");
        dps::write_trace_jsonl(trace->trace, path, manifest_hash ? manifest_hash : "");
    });
}

void sc_dps_trace_free(sc_dps_trace* trace) { delete trace; }

// ---- ring -----------------------------------------------------------------

sc_status sc_ring_nodes_in_ring(uint64_t c, uint64_t d_rings, uint64_t ring, uint64_t* out) {
    return guarded([&] {
        require(out, "out");
        *out = ring::nodes_in_ring({c, d_rings}, ring);
    });
}

sc_status sc_ring_total_nodes(uint64_t c, uint64_t d_rings, uint64_t* out) {
    return guarded([&] {
        require(out, "out");
        *out = ring::total_nodes({c, d_rings});
    });
}

sc_status sc_ring_total_transmissions(uint64_t c, uint64_t d_rings, uint64_t* out) {
    return guarded([&] {
        require(out, "out");
        *out = ring::total_transmissions({c, d_rings});
    });
}

sc_status sc_ring_printed_closed_form(uint64_t c, uint64_t d_rings, double* out) {
    return guarded([&] {
        require(out, "out");
        *out = ring::printed_closed_form({c, d_rings});
    });
}

sc_status sc_ring_network_savings(uint64_t c, uint64_t d_rings, double percent, uint64_t* out) {
    return guarded([&] {
        require(out, "out");
        *out = ring::network_savings({c, d_rings}, percent);
    });
}

// ---- evaluation -----------------------------------------------------------

sc_status sc_evaluation_create(sc_evaluation** out) {
    return guarded([&] {
        require(out, "out");
        *out = new sc_evaluation{};
    });
}

sc_status sc_evaluation_add(sc_evaluation* eval, const sc_series* series, const sc_dataset_desc* desc,
                            const sc_fit_config* config, size_t history, size_t window,
                            size_t n_splits, uint64_t seed) {
    return guarded([&] {
        require(eval, "evaluation");
        require(series, "series");
        eval::Scenario s;
        s.descriptor = to_descriptor(desc);
        s.method = to_config(config);
        s.history = history;
        s.window = window;
        s.n_splits = n_splits;
        s.seed = seed;
        eval->series.push_back(series->series);
        eval->scenarios.push_back(std::move(s));
    });
}

sc_status sc_evaluation_run(sc_evaluation* eval, unsigned workers) {
    return guarded([&] {
        require(eval, "evaluation");
        std::vector<eval::GridJob> jobs;
        for (std::size_t i = 0; i < eval->scenarios.size(); ++i) {
            jobs.push_back({eval->scenarios[i], eval->series[i].get()});
        }
        eval->rows = eval::run_grid(jobs, workers);
    });
}

size_t sc_evaluation_row_count(const sc_evaluation* eval) { return eval ? eval->rows.size() : 0; }

sc_status sc_evaluation_write(const sc_evaluation* eval, const char* json_path, const char* csv_path,
                              const char* manifest_hash, const char* manifest_json) {
    return guarded([&] {
        require(eval, "evaluation");
        require(json_path, "json_path");
        require(csv_path, "csv_path");
        eval::emit_report(eval->rows, json_path, csv_path, manifest_hash ? manifest_hash : "",
                          manifest_json ? manifest_json : "{}");
    });
}

void sc_evaluation_free(sc_evaluation* eval) { delete eval; }

} // extern "C"
