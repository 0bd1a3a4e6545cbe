/*
 * sensorcast C API.
 *
 * All functions returning sc_status report failures through the status code;
 * sc_last_error() then returns a message for the calling thread. Handles are
 * opaque and owned by the caller once returned; release them with the
 * matching *_free function (NULL is accepted).
 *
 * Buffer outputs follow the two-call convention: pass buf = NULL to learn the
 * required size in *len, then call again with a large enough buffer.
 */
#ifndef SENSORCAST_H
#define SENSORCAST_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define SC_API __declspec(dllexport)
#else
#  define SC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sc_status {
    SC_OK = 0,
    SC_ERR_INVALID_ARGUMENT = 1,
    SC_ERR_DATA = 2,
    SC_ERR_IO = 3,
    SC_ERR_NUMERIC = 4,
    SC_ERR_PROTOCOL = 5,
    SC_ERR_INTERNAL = 6
} sc_status;

typedef enum sc_method {
    SC_METHOD_CONSTANT = 0,
    SC_METHOD_LINEAR = 1,
    SC_METHOD_SIMPLE_MEAN = 2,
    SC_METHOD_ES = 3,
    SC_METHOD_ARIMA = 4
} sc_method;

typedef enum sc_family {
    SC_FAMILY_INTEL = 0,
    SC_FAMILY_SENSORSCOPE = 1,
    SC_FAMILY_BALL = 2,
    SC_FAMILY_RUNNING_LATITUDE = 3,
    SC_FAMILY_RUNNING_LONGITUDE = 4
} sc_family;

typedef struct sc_series sc_series;
typedef struct sc_model sc_model;
typedef struct sc_dps_trace sc_dps_trace;
typedef struct sc_evaluation sc_evaluation;

SC_API const char* sc_version(void);
SC_API const char* sc_last_error(void);

SC_API sc_status sc_method_from_name(const char* name, sc_method* out);
SC_API const char* sc_method_name(sc_method method);
SC_API sc_status sc_family_from_name(const char* name, sc_family* out);
SC_API const char* sc_family_name(sc_family family);
SC_API sc_status sc_builtin_threshold(sc_family family, double* out);

/* FNV-1a 64-bit hash, used for manifest fingerprints. */
SC_API uint64_t sc_fnv1a64(const void* data, size_t len);

/* ---- series ------------------------------------------------------------ */

typedef struct sc_ball_params {
    double theta0;
    double lambda;
    double gamma;
    size_t n;
    double dt;
    uint64_t seed;
    int suppress_noise;
} sc_ball_params;

typedef struct sc_dataset_desc {
    sc_family family;
    int group;
    double delta_min;       /* <= 0 selects the family's builtin threshold */
    double expected_period; /* <= 0 selects the family's default period */
    const char* sensor_id;  /* may be NULL */
    uint64_t noise_seed;
    int noise_all_values;
} sc_dataset_desc;

/* group is 1..3; fills one of the three published Ball configurations. */
SC_API sc_status sc_ball_standard_params(int group, uint64_t seed, sc_ball_params* out);
SC_API sc_status sc_series_generate_ball(const sc_ball_params* params, sc_series** out);
SC_API sc_status sc_series_from_values(const double* values, size_t n, double period,
                                       sc_series** out);
SC_API sc_status sc_series_load_csv(const char* path, const sc_dataset_desc* desc,
                                    sc_series** out);
SC_API sc_status sc_series_write_ball_csv(const sc_series* series, const char* path);
SC_API size_t sc_series_length(const sc_series* series);
SC_API sc_status sc_series_copy_values(const sc_series* series, double* out, size_t capacity);
SC_API sc_status sc_series_quantize(const sc_series* series, double resolution, sc_series** out);
SC_API sc_status sc_calibrate_resolution(const sc_series* series, double target, double* out);
SC_API void sc_series_free(sc_series* series);

/* ---- forecasting models ------------------------------------------------ */

typedef struct sc_fit_config {
    sc_method method;
    int optimizer_budget; /* 1..10; 0 selects the default */
    const int* orders;    /* ARIMA (p, d, q) triples; NULL selects the full grid */
    size_t n_orders;      /* number of triples */
    int es_simple;
    int es_holt;
} sc_fit_config;

SC_API void sc_fit_config_default(sc_method method, sc_fit_config* out);
SC_API sc_status sc_model_fit(const sc_fit_config* config, const double* history, size_t n,
                              sc_model** out);
SC_API sc_status sc_model_forecast(const sc_model* model, size_t horizon, double* out);
/* Canonical wire payload: u8 kind, u8 orders, u16 count, count x f64 LE. */
SC_API sc_status sc_model_encode(const sc_model* model, uint8_t* buf, size_t capacity, size_t* len);
SC_API sc_status sc_model_decode(const uint8_t* buf, size_t len, sc_model** out);
/* {kind, orders, params[], state[], k, fit_n}; *len includes the terminating NUL. */
SC_API sc_status sc_model_to_json(const sc_model* model, char* buf, size_t capacity, size_t* len);
SC_API void sc_model_free(sc_model* model);

/* ---- dual prediction scheme -------------------------------------------- */

typedef struct sc_dps_summary {
    size_t steps;
    size_t bootstrap_steps;
    size_t post_bootstrap_steps;
    size_t measurements; /* post-bootstrap Measurement messages */
    size_t model_updates;
    size_t model_overhead;
    size_t fallbacks;
    size_t wire_bytes;
    double saved_fraction; /* percent of post-bootstrap steps */
    double max_abs_error;  /* max |reconstructed - actual| */
} sc_dps_summary;

SC_API sc_status sc_dps_run(const sc_series* series, const sc_fit_config* config, size_t history,
                            size_t window, double delta_min, sc_dps_trace** out);
SC_API sc_status sc_dps_summary_get(const sc_dps_trace* trace, sc_dps_summary* out);
SC_API sc_status sc_dps_write_jsonl(const sc_dps_trace* trace, const char* path,
                                    const char* manifest_hash);
SC_API void sc_dps_trace_free(sc_dps_trace* trace);

/* ---- ring topology ----------------------------------------------------- */

SC_API sc_status sc_ring_nodes_in_ring(uint64_t c, uint64_t d_rings, uint64_t ring, uint64_t* out);
SC_API sc_status sc_ring_total_nodes(uint64_t c, uint64_t d_rings, uint64_t* out);
SC_API sc_status sc_ring_total_transmissions(uint64_t c, uint64_t d_rings, uint64_t* out);
/* The closed form as originally printed; differs from the exact count. */
SC_API sc_status sc_ring_printed_closed_form(uint64_t c, uint64_t d_rings, double* out);
SC_API sc_status sc_ring_network_savings(uint64_t c, uint64_t d_rings, double percent,
                                         uint64_t* out);

/* ---- evaluation grid --------------------------------------------------- */

SC_API sc_status sc_evaluation_create(sc_evaluation** out);
/* Queues one scenario; the series is shared, not copied. */
SC_API sc_status sc_evaluation_add(sc_evaluation* eval, const sc_series* series,
                                   const sc_dataset_desc* desc, const sc_fit_config* config,
                                   size_t history, size_t window, size_t n_splits, uint64_t seed);
/* workers = 0 uses every available core. */
SC_API sc_status sc_evaluation_run(sc_evaluation* eval, unsigned workers);
SC_API size_t sc_evaluation_row_count(const sc_evaluation* eval);
SC_API sc_status sc_evaluation_write(const sc_evaluation* eval, const char* json_path,
                                     const char* csv_path, const char* manifest_hash,
                                     const char* manifest_json);
SC_API void sc_evaluation_free(sc_evaluation* eval);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SENSORCAST_H */
