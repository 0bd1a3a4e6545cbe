#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sensorcast {

enum class MethodKind : unsigned char {
    Constant = 0,
    Linear = 1,
    SimpleMean = 2,
    ExponentialSmoothing = 3,
    Arima = 4,
};

std::string_view method_name(MethodKind kind) noexcept;
/// Accepts the names produced by method_name ("constant", "linear",
/// "simple_mean", "es", "arima"). Throws InvalidArgument otherwise.
MethodKind parse_method(std::string_view name);

struct ArimaOrder {
    int p = 0;
    int d = 0;
    int q = 0;

    friend bool operator==(const ArimaOrder&, const ArimaOrder&) = default;
};

/// All (p, d, q) with p, d, q in {0, 1, 2}.
std::vector<ArimaOrder> full_arima_grid();

struct EsVariants {
    bool simple = true;
    bool holt = true;
};

struct FitConfig {
    MethodKind method = MethodKind::Constant;
    /// ARIMA candidates; empty means full_arima_grid().
    std::vector<ArimaOrder> order_grid;
    EsVariants es_variants;
    /// When non-empty, ES smoothing parameters are restricted to exactly these
    /// values (no clamping, no refinement).
    std::vector<double> es_alpha_grid;
    std::vector<double> es_beta_grid;
    /// Iteration budget, 1..10.
    int optimizer_budget = 10;

    static FitConfig for_method(MethodKind kind);
};

/**
 * A fitted forecasting model. Everything needed to forecast lives in
 * `params` and `state`, so a model rebuilt from those two vectors (plus kind
 * and orders) forecasts bit-identically.
 *
 * Layouts:
 *   Constant    params [last]                 state []
 *   Linear      params [last, slope]          state []
 *   SimpleMean  params [mean]                 state []
 *   ES simple   params [alpha]                state [level]
 *   ES Holt     params [alpha, beta]          state [level, trend]
 *   ARIMA       params [phi_1..p, theta_1..q, (intercept if d == 0)]
 *               state  [anchors_0..d-1, w_{n-p}..w_{n-1}, e_{n-q}..e_{n-1}]
 * where anchors_j is the last value of the j-times differenced history and w
 * is the d-times differenced history.
 */
struct ForecastModel {
    MethodKind kind = MethodKind::Constant;
    ArimaOrder orders;
    std::vector<double> params;
    std::vector<double> state;
    int k = 0;
    std::size_t fit_n = 0;
    /// In-sample AICc; +inf when the model could not be scored.
    double aicc = 0.0;

    bool is_holt() const noexcept {
        return kind == MethodKind::ExponentialSmoothing && params.size() == 2;
    }
};

/// Number of params / state values implied by kind and orders.
std::size_t param_count(MethodKind kind, ArimaOrder orders, bool holt);
std::size_t state_count(MethodKind kind, ArimaOrder orders, bool holt);

/// neg2_loglik + 2k + 2k(k+1)/(n-k-1); throws InvalidArgument when n <= k+1.
double aicc(double neg2_loglik, int k, std::size_t n);

/// -2 log-likelihood of n Gaussian errors with ML variance sse/n. The variance
/// is floored at `variance_floor` so exact fits stay finite.
double gaussian_neg2_loglik(double sse, std::size_t n, double variance_floor);

ForecastModel fit_constant(std::span<const double> history);
ForecastModel fit_linear(std::span<const double> history);
ForecastModel fit_simple_mean(std::span<const double> history);
ForecastModel fit_es(std::span<const double> history, const FitConfig& config);
ForecastModel fit_arima(std::span<const double> history, const FitConfig& config);

/// Dispatches on config.method.
ForecastModel fit(std::span<const double> history, const FitConfig& config);

/// Smallest history the method accepts under `config`.
std::size_t min_history(const FitConfig& config);

/// Static multi-step forecast of `horizon` values; throws on horizon == 0.
std::vector<double> forecast(const ForecastModel& model, std::size_t horizon);

/**
 * Fits every candidate whose preconditions hold and returns the one with
 * the lowest AICc. Ties go to fewer parameters, then to candidate order.
 * Throws DataError when every candidate was skipped.
 */
ForecastModel select_model(std::span<const double> history, std::span<const FitConfig> candidates);

namespace arima_detail {

/// Differencing order picked for `values` among `allowed` (sorted, unique).
int choose_differencing(std::span<const double> values, std::span<const int> allowed);

/// Dickey-Fuller regression Δy_t = a + b y_{t-1} + e_t. True when the unit
/// root is rejected at the 5% level.
bool rejects_unit_root(std::span<const double> values);

std::vector<double> difference(std::span<const double> values, int times);

/**
 * Conditional sum of squares of ARMA(p, q) residuals on `w`, with residuals
 * before `start` held at zero and excluded from the sum. `coef` holds
 * [phi, theta, (intercept)].
 */
double css(std::span<const double> w, int p, int q, bool intercept, std::span<const double> coef,
           std::size_t start, std::vector<double>* residuals = nullptr);

/// True when every root of the AR and MA polynomials lies outside |z| = 1.001.
bool admissible(std::span<const double> phi, std::span<const double> theta);

} // namespace arima_detail

} // namespace sensorcast
