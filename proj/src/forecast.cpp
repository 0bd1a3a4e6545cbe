#include "sensorcast/forecast.hpp"

#include "sensorcast/error.hpp"
#include "sensorcast/optimize.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>

namespace sensorcast {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEsLow = 0.01;
constexpr double kEsHigh = 0.99;
constexpr int kCoarseGridPoints = 10;

void require_finite(std::span<const double> history, const char* who) {
    for (std::size_t i = 0; i < history.size(); ++i) {
        if (!std::isfinite(history[i])) {
            throw InvalidArgument(std::string(who) + ": non-finite value at index " +
                                  std::to_string(i));
        }
    }
}

double variance_floor(std::span<const double> x) {
    double scale = 0.0;
    for (double v : x) {
        scale = std::max(scale, std::abs(v));
    }
    const double s = 1e-12 * scale;
    return s * s + std::numeric_limits<double>::min();
}

double score(double sse, std::size_t n, int k, double floor) {
    if (n <= static_cast<std::size_t>(k) + 1) {
        return kInf;
    }
    return aicc(gaussian_neg2_loglik(sse, n, floor), k, n);
}

double mean_of(std::span<const double> x) {
    double sum = 0.0;
    for (double v : x) {
        sum += v;
    }
    return sum / static_cast<double>(x.size());
}

double variance_of(std::span<const double> x) {
    if (x.size() < 2) {
        return 0.0;
    }
    const double m = mean_of(x);
    double acc = 0.0;
    for (double v : x) {
        acc += (v - m) * (v - m);
    }
    return acc / static_cast<double>(x.size() - 1);
}

void check_budget(const FitConfig& config) {
    if (config.optimizer_budget < 1 || config.optimizer_budget > 10) {
        throw InvalidArgument("fit: optimizer budget must lie in [1, 10]");
    }
}

// ---------------------------------------------------------------------------
// Exponential smoothing

struct EsFit {
    std::vector<double> params;
    std::vector<double> state;
    double sse = kInf;
};

// One-step errors are scored from t = 2 for both variants so their AICc share n.
constexpr std::size_t kEsScoreStart = 2;

EsFit run_simple(std::span<const double> x, double alpha) {
    double level = x[0];
    double sse = 0.0;
    for (std::size_t t = 1; t < x.size(); ++t) {
        const double e = x[t] - level;
        if (t >= kEsScoreStart) {
            sse += e * e;
        }
        level = alpha * x[t] + (1.0 - alpha) * level;
    }
    return {{alpha}, {level}, sse};
}

EsFit run_holt(std::span<const double> x, double alpha, double beta) {
    double level = x[1];
    double trend = x[1] - x[0];
    double sse = 0.0;
    for (std::size_t t = 2; t < x.size(); ++t) {
        const double e = x[t] - (level + trend);
        sse += e * e;
        const double next = alpha * x[t] + (1.0 - alpha) * (level + trend);
        trend = beta * (next - level) + (1.0 - beta) * trend;
        level = next;
    }
    return {{alpha, beta}, {level, trend}, sse};
}

std::vector<double> coarse_grid() {
    std::vector<double> g(kCoarseGridPoints);
    for (int i = 0; i < kCoarseGridPoints; ++i) {
        g[i] = kEsLow + (kEsHigh - kEsLow) * i / (kCoarseGridPoints - 1);
    }
    return g;
}

// Bracket of one coarse-grid step around `x`, clipped to the parameter bounds.
std::pair<double, double> bracket(double x) {
    const double step = (kEsHigh - kEsLow) / (kCoarseGridPoints - 1);
    return {std::max(kEsLow, x - step), std::min(kEsHigh, x + step)};
}

EsFit fit_simple_variant(std::span<const double> x, const FitConfig& config) {
    const bool fixed = !config.es_alpha_grid.empty();
    const auto grid = fixed ? config.es_alpha_grid : coarse_grid();
    EsFit best;
    for (double a : grid) {
        EsFit f = run_simple(x, a);
        if (f.sse < best.sse) {
            best = std::move(f);
        }
    }
    if (fixed || !std::isfinite(best.sse)) {
        return best;
    }
    const auto [lo, hi] = bracket(best.params[0]);
    const auto refined = optimize::golden_section(
        [&](double a) { return run_simple(x, a).sse; }, lo, hi, config.optimizer_budget);
    if (refined.value < best.sse) {
        best = run_simple(x, refined.x);
    }
    return best;
}

EsFit fit_holt_variant(std::span<const double> x, const FitConfig& config) {
    const bool fixed_alpha = !config.es_alpha_grid.empty();
    const bool fixed_beta = !config.es_beta_grid.empty();
    const auto alphas = fixed_alpha ? config.es_alpha_grid : coarse_grid();
    const auto betas = fixed_beta ? config.es_beta_grid : coarse_grid();
    EsFit best;
    for (double a : alphas) {
        for (double b : betas) {
            EsFit f = run_holt(x, a, b);
            if (f.sse < best.sse) {
                best = std::move(f);
            }
        }
    }
    if (!std::isfinite(best.sse)) {
        return best;
    }
    // Two rounds of coordinate-wise golden-section refinement.
    double alpha = best.params[0];
    double beta = best.params[1];
    for (int round = 0; round < 2; ++round) {
        if (!fixed_alpha) {
            const auto [lo, hi] = bracket(alpha);
            const auto r = optimize::golden_section(
                [&](double a) { return run_holt(x, a, beta).sse; }, lo, hi,
                config.optimizer_budget);
            if (r.value < run_holt(x, alpha, beta).sse) {
                alpha = r.x;
            }
        }
        if (!fixed_beta) {
            const auto [lo, hi] = bracket(beta);
            const auto r = optimize::golden_section(
                [&](double b) { return run_holt(x, alpha, b).sse; }, lo, hi,
                config.optimizer_budget);
            if (r.value < run_holt(x, alpha, beta).sse) {
                beta = r.x;
            }
        }
    }
    EsFit refined = run_holt(x, alpha, beta);
    return refined.sse < best.sse ? refined : best;
}

// ---------------------------------------------------------------------------
// ARIMA

struct ArmaEstimate {
    std::vector<double> coef;
    std::vector<double> residuals;
    double sse = kInf;
    bool ok = false;
};

std::size_t coef_count(int p, int q, bool intercept) {
    return static_cast<std::size_t>(p + q) + (intercept ? 1U : 0U);
}

std::span<const double> phi_of(std::span<const double> coef, int p) {
    return coef.subspan(0, static_cast<std::size_t>(p));
}

std::span<const double> theta_of(std::span<const double> coef, int p, int q) {
    return coef.subspan(static_cast<std::size_t>(p), static_cast<std::size_t>(q));
}

// Least squares y = X b via column-pivoting QR.
std::optional<Eigen::VectorXd> least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    if (x.rows() < x.cols() || x.cols() == 0) {
        return std::nullopt;
    }
    Eigen::VectorXd b = x.colPivHouseholderQr().solve(y);
    if (!b.allFinite()) {
        return std::nullopt;
    }
    return b;
}

// OLS for ARMA(p, 0) on rows t >= start; exact CSS minimizer.
std::optional<std::vector<double>> fit_ar_ols(std::span<const double> w, int p, bool intercept,
                                              std::size_t start) {
    const std::size_t m = w.size();
    if (start >= m) {
        return std::nullopt;
    }
    const std::size_t rows = m - start;
    if (p == 0) {
        if (!intercept) {
            return std::vector<double>{};
        }
        return std::vector<double>{mean_of(w.subspan(start))};
    }
    const std::size_t cols = static_cast<std::size_t>(p) + (intercept ? 1U : 0U);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = start + r;
        y(static_cast<Eigen::Index>(r)) = w[t];
        for (int i = 1; i <= p; ++i) {
            x(static_cast<Eigen::Index>(r), i - 1) = w[t - static_cast<std::size_t>(i)];
        }
        if (intercept) {
            x(static_cast<Eigen::Index>(r), p) = 1.0;
        }
    }
    const auto b = least_squares(x, y);
    if (!b) {
        return std::nullopt;
    }
    return std::vector<double>(b->data(), b->data() + b->size());
}

// Hannan-Rissanen: long AR for residual proxies, then OLS on lags of w and e.
std::optional<std::vector<double>> hannan_rissanen(std::span<const double> w, int p, int q,
                                                   bool intercept) {
    const std::size_t m = w.size();
    const std::size_t long_order =
        std::min<std::size_t>(std::max<std::size_t>(static_cast<std::size_t>(p + q) + 2, 8), m / 4);
    if (long_order < 1) {
        return std::nullopt;
    }
    const auto ar = fit_ar_ols(w, static_cast<int>(long_order), true, long_order);
    if (!ar) {
        return std::nullopt;
    }
    std::vector<double> e(m, 0.0);
    for (std::size_t t = long_order; t < m; ++t) {
        double pred = (*ar)[long_order];
        for (std::size_t i = 1; i <= long_order; ++i) {
            pred += (*ar)[i - 1] * w[t - i];
        }
        e[t] = w[t] - pred;
    }
    const std::size_t start = long_order + static_cast<std::size_t>(std::max(p, q));
    if (start >= m) {
        return std::nullopt;
    }
    const std::size_t rows = m - start;
    const std::size_t cols = coef_count(p, q, intercept);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = start + r;
        const auto row = static_cast<Eigen::Index>(r);
        y(row) = w[t];
        for (int i = 1; i <= p; ++i) {
            x(row, i - 1) = w[t - static_cast<std::size_t>(i)];
        }
        for (int j = 1; j <= q; ++j) {
            x(row, p + j - 1) = e[t - static_cast<std::size_t>(j)];
        }
        if (intercept) {
            x(row, p + q) = 1.0;
        }
    }
    const auto b = least_squares(x, y);
    if (!b) {
        return std::nullopt;
    }
    return std::vector<double>(b->data(), b->data() + b->size());
}

// Pulls AR/MA coefficients toward zero until the polynomial roots are admissible.
bool make_admissible(std::vector<double>& coef, int p, int q) {
    for (int attempt = 0; attempt < 60; ++attempt) {
        if (arima_detail::admissible(phi_of(coef, p), theta_of(coef, p, q))) {
            return true;
        }
        for (int i = 0; i < p + q; ++i) {
            coef[static_cast<std::size_t>(i)] *= 0.8;
        }
    }
    return arima_detail::admissible(phi_of(coef, p), theta_of(coef, p, q));
}

ArmaEstimate estimate_arma(std::span<const double> w, int p, int q, bool intercept,
                           std::size_t start, int budget) {
    ArmaEstimate est;
    std::vector<double> coef;
    if (q == 0) {
        auto ols = fit_ar_ols(w, p, intercept, start);
        if (!ols) {
            return est;
        }
        coef = std::move(*ols);
        if (arima_detail::admissible(phi_of(coef, p), {})) {
            est.coef = coef;
            est.sse = arima_detail::css(w, p, q, intercept, coef, start, &est.residuals);
            est.ok = std::isfinite(est.sse);
            return est;
        }
    } else {
        auto hr = hannan_rissanen(w, p, q, intercept);
        if (hr) {
            coef = std::move(*hr);
        } else {
            auto ar = fit_ar_ols(w, p, intercept, start);
            if (!ar) {
                return est;
            }
            coef.assign(coef_count(p, q, intercept), 0.0);
            std::copy_n(ar->begin(), p, coef.begin());
            if (intercept) {
                coef.back() = ar->back();
            }
        }
    }

    if (!make_admissible(coef, p, q)) {
        std::fill_n(coef.begin(), p + q, 0.0);
    }
    const auto objective = [&](std::span<const double> c) {
        if (!arima_detail::admissible(phi_of(c, p), theta_of(c, p, q))) {
            return kInf;
        }
        return arima_detail::css(w, p, q, intercept, c, start);
    };
    const auto result = optimize::nelder_mead(objective, coef, 0.1, 50 * budget);
    est.coef = result.x;
    est.sse = arima_detail::css(w, p, q, intercept, est.coef, start, &est.residuals);
    est.ok = std::isfinite(est.sse) &&
             arima_detail::admissible(phi_of(est.coef, p), theta_of(est.coef, p, q));
    return est;
}

int arima_k(ArimaOrder o) { return o.p + o.q + (o.d == 0 ? 1 : 0) + 1; }

std::vector<ArimaOrder> checked_grid(const FitConfig& config) {
    auto grid = config.order_grid.empty() ? full_arima_grid() : config.order_grid;
    for (const auto& o : grid) {
        if (o.p < 0 || o.p > 2 || o.d < 0 || o.d > 2 || o.q < 0 || o.q > 2) {
            throw InvalidArgument("fit_arima: orders must lie in {0, 1, 2}");
        }
    }
    return grid;
}

} // namespace

std::string_view method_name(MethodKind kind) noexcept {
    switch (kind) {
    case MethodKind::Constant:
        return "constant";
    case MethodKind::Linear:
        return "linear";
    case MethodKind::SimpleMean:
        return "simple_mean";
    case MethodKind::ExponentialSmoothing:
        return "es";
    case MethodKind::Arima:
        return "arima";
    }
    return "unknown";
}

MethodKind parse_method(std::string_view name) {
    for (auto kind : {MethodKind::Constant, MethodKind::Linear, MethodKind::SimpleMean,
                      MethodKind::ExponentialSmoothing, MethodKind::Arima}) {
        if (method_name(kind) == name) {
            return kind;
        }
    }
    throw InvalidArgument("unknown forecasting method '" + std::string(name) + "'");
}

std::vector<ArimaOrder> full_arima_grid() {
    std::vector<ArimaOrder> grid;
    for (int d = 0; d <= 2; ++d) {
        for (int p = 0; p <= 2; ++p) {
            for (int q = 0; q <= 2; ++q) {
                grid.push_back({p, d, q});
            }
        }
    }
    return grid;
}

FitConfig FitConfig::for_method(MethodKind kind) {
    FitConfig c;
    c.method = kind;
    return c;
}

std::size_t param_count(MethodKind kind, ArimaOrder orders, bool holt) {
    switch (kind) {
    case MethodKind::Constant:
    case MethodKind::SimpleMean:
        return 1;
    case MethodKind::Linear:
        return 2;
    case MethodKind::ExponentialSmoothing:
        return holt ? 2 : 1;
    case MethodKind::Arima:
        return coef_count(orders.p, orders.q, orders.d == 0);
    }
    return 0;
}

std::size_t state_count(MethodKind kind, ArimaOrder orders, bool holt) {
    switch (kind) {
    case MethodKind::ExponentialSmoothing:
        return holt ? 2 : 1;
    case MethodKind::Arima:
        return static_cast<std::size_t>(orders.d + orders.p + orders.q);
    default:
        return 0;
    }
}

double aicc(double neg2_loglik, int k, std::size_t n) {
    if (k < 0 || n <= static_cast<std::size_t>(k) + 1) {
        throw InvalidArgument("aicc: need n > k + 1 (n = " + std::to_string(n) +
                              ", k = " + std::to_string(k) + ")");
    }
    const double kk = k;
    return neg2_loglik + 2.0 * kk + 2.0 * kk * (kk + 1.0) / (static_cast<double>(n) - kk - 1.0);
}

double gaussian_neg2_loglik(double sse, std::size_t n, double variance_floor) {
    const double nn = static_cast<double>(n);
    const double sigma2 = std::max(sse / nn, variance_floor);
    return nn * (std::log(2.0 * std::numbers::pi * sigma2) + 1.0);
}

ForecastModel fit_constant(std::span<const double> history) {
    if (history.empty()) {
        throw InvalidArgument("fit_constant: empty history");
    }
    require_finite(history, "fit_constant");
    ForecastModel m;
    m.kind = MethodKind::Constant;
    m.params = {history.back()};
    m.k = 1;
    m.fit_n = history.size();
    double sse = 0.0;
    for (std::size_t t = 1; t < history.size(); ++t) {
        const double e = history[t] - history[t - 1];
        sse += e * e;
    }
    m.aicc = history.size() > 1 ? score(sse, history.size() - 1, m.k, variance_floor(history)) : kInf;
    return m;
}

ForecastModel fit_linear(std::span<const double> history) {
    if (history.size() < 2) {
        throw InvalidArgument("fit_linear: need at least two values");
    }
    require_finite(history, "fit_linear");
    const double last = history[history.size() - 1];
    const double prev = history[history.size() - 2];
    ForecastModel m;
    m.kind = MethodKind::Linear;
    m.params = {last, last - prev};
    m.k = 1;
    m.fit_n = history.size();
    double sse = 0.0;
    for (std::size_t t = 2; t < history.size(); ++t) {
        const double e = history[t] - (2.0 * history[t - 1] - history[t - 2]);
        sse += e * e;
    }
    m.aicc = history.size() > 2 ? score(sse, history.size() - 2, m.k, variance_floor(history)) : kInf;
    return m;
}

ForecastModel fit_simple_mean(std::span<const double> history) {
    if (history.empty()) {
        throw InvalidArgument("fit_simple_mean: empty history");
    }
    require_finite(history, "fit_simple_mean");
    const double mean = mean_of(history);
    ForecastModel m;
    m.kind = MethodKind::SimpleMean;
    m.params = {mean};
    m.k = 2;
    m.fit_n = history.size();
    double sse = 0.0;
    for (double v : history) {
        sse += (v - mean) * (v - mean);
    }
    m.aicc = score(sse, history.size(), m.k, variance_floor(history));
    return m;
}

ForecastModel fit_es(std::span<const double> history, const FitConfig& config) {
    if (history.size() < 4) {
        throw InvalidArgument("fit_es: need at least 4 values, got " +
                              std::to_string(history.size()));
    }
    if (!config.es_variants.simple && !config.es_variants.holt) {
        throw InvalidArgument("fit_es: no variant enabled");
    }
    check_budget(config);
    require_finite(history, "fit_es");

    const double floor = variance_floor(history);
    const std::size_t n = history.size() - kEsScoreStart;

    struct Candidate {
        EsFit fit;
        int k;
        double aicc;
    };
    std::vector<Candidate> candidates;
    if (config.es_variants.simple) {
        EsFit f = fit_simple_variant(history, config);
        candidates.push_back({f, 2, score(f.sse, n, 2, floor)});
    }
    if (config.es_variants.holt) {
        EsFit f = fit_holt_variant(history, config);
        candidates.push_back({f, 4, score(f.sse, n, 4, floor)});
    }

    const Candidate* best = &candidates.front();
    for (const auto& c : candidates) {
        if (c.aicc < best->aicc) {
            best = &c;
        }
    }
    if (!std::isfinite(best->fit.sse)) {
        throw NumericError("fit_es: smoothing produced a non-finite error sum");
    }
    ForecastModel m;
    m.kind = MethodKind::ExponentialSmoothing;
    m.params = best->fit.params;
    m.state = best->fit.state;
    m.k = best->k;
    m.fit_n = history.size();
    m.aicc = best->aicc;
    return m;
}

ForecastModel fit_arima(std::span<const double> history, const FitConfig& config) {
    const auto grid = checked_grid(config);
    check_budget(config);
    if (history.size() < min_history(config)) {
        throw InvalidArgument("fit_arima: history of length " + std::to_string(history.size()) +
                              " is shorter than the required " +
                              std::to_string(min_history(config)));
    }
    require_finite(history, "fit_arima");

    std::vector<int> allowed_d;
    for (const auto& o : grid) {
        allowed_d.push_back(o.d);
    }
    std::sort(allowed_d.begin(), allowed_d.end());
    allowed_d.erase(std::unique(allowed_d.begin(), allowed_d.end()), allowed_d.end());
    const int d = allowed_d.size() == 1 ? allowed_d.front()
                                         : arima_detail::choose_differencing(history, allowed_d);

    std::vector<ArimaOrder> candidates;
    for (const auto& o : grid) {
        if (o.d == d) {
            candidates.push_back(o);
        }
    }
    const auto w = arima_detail::difference(history, d);
    const double floor = variance_floor(w);
    const bool intercept = d == 0;

    std::size_t common_start = 0;
    for (const auto& o : candidates) {
        common_start = std::max<std::size_t>(common_start, static_cast<std::size_t>(std::max(o.p, o.q)));
    }

    std::optional<ArimaOrder> chosen;
    ArmaEstimate chosen_est;
    double chosen_aicc = kInf;
    for (const auto& o : candidates) {
        ArmaEstimate est = estimate_arma(w, o.p, o.q, intercept, common_start, config.optimizer_budget);
        if (!est.ok) {
            continue;
        }
        const double a = score(est.sse, w.size() - common_start, arima_k(o), floor);
        if (!std::isfinite(a)) {
            continue;
        }
        const bool better = !chosen || a < chosen_aicc ||
                            (a == chosen_aicc && arima_k(o) < arima_k(*chosen));
        if (better) {
            chosen = o;
            chosen_est = std::move(est);
            chosen_aicc = a;
        }
    }
    if (!chosen) {
        std::string desc = "length " + std::to_string(history.size()) + ", first " +
                           std::to_string(history.front()) + ", last " +
                           std::to_string(history.back());
        throw NumericError("fit_arima: every candidate fit was degenerate for history (" + desc + ")");
    }

    const auto own_start = static_cast<std::size_t>(std::max(chosen->p, chosen->q));
    double own_aicc = chosen_aicc;
    if (own_start != common_start) {
        ArmaEstimate refit =
            estimate_arma(w, chosen->p, chosen->q, intercept, own_start, config.optimizer_budget);
        const double a = score(refit.sse, w.size() - own_start, arima_k(*chosen), floor);
        if (refit.ok && std::isfinite(a)) {
            chosen_est = std::move(refit);
            own_aicc = a;
        }
    }

    ForecastModel m;
    m.kind = MethodKind::Arima;
    m.orders = *chosen;
    m.params = chosen_est.coef;
    m.k = arima_k(*chosen);
    m.fit_n = history.size();
    m.aicc = own_aicc;
    for (int j = 0; j < d; ++j) {
        m.state.push_back(arima_detail::difference(history, j).back());
    }
    for (int i = chosen->p; i >= 1; --i) {
        m.state.push_back(w[w.size() - static_cast<std::size_t>(i)]);
    }
    const auto& e = chosen_est.residuals;
    for (int j = chosen->q; j >= 1; --j) {
        m.state.push_back(e[e.size() - static_cast<std::size_t>(j)]);
    }
    return m;
}

ForecastModel fit(std::span<const double> history, const FitConfig& config) {
    switch (config.method) {
    case MethodKind::Constant:
        return fit_constant(history);
    case MethodKind::Linear:
        return fit_linear(history);
    case MethodKind::SimpleMean:
        return fit_simple_mean(history);
    case MethodKind::ExponentialSmoothing:
        return fit_es(history, config);
    case MethodKind::Arima:
        return fit_arima(history, config);
    }
    throw InvalidArgument("fit: unknown method");
}

std::size_t min_history(const FitConfig& config) {
    switch (config.method) {
    case MethodKind::Constant:
    case MethodKind::SimpleMean:
        return 1;
    case MethodKind::Linear:
        return 2;
    case MethodKind::ExponentialSmoothing:
        return 4;
    case MethodKind::Arima: {
        int max_order = 0;
        for (const auto& o : checked_grid(config)) {
            max_order = std::max({max_order, o.p, o.d, o.q});
        }
        return 10 + static_cast<std::size_t>(max_order);
    }
    }
    return 1;
}

std::vector<double> forecast(const ForecastModel& model, std::size_t horizon) {
    if (horizon == 0) {
        throw InvalidArgument("forecast: horizon must be at least 1");
    }
    const bool holt = model.is_holt();
    if (model.params.size() != param_count(model.kind, model.orders, holt) ||
        model.state.size() != state_count(model.kind, model.orders, holt)) {
        throw InvalidArgument("forecast: parameter layout does not match the model kind");
    }
    std::vector<double> out(horizon);
    switch (model.kind) {
    case MethodKind::Constant:
    case MethodKind::SimpleMean:
        std::fill(out.begin(), out.end(), model.params[0]);
        break;
    case MethodKind::Linear:
        for (std::size_t i = 0; i < horizon; ++i) {
            out[i] = model.params[0] + static_cast<double>(i + 1) * model.params[1];
        }
        break;
    case MethodKind::ExponentialSmoothing:
        for (std::size_t i = 0; i < horizon; ++i) {
            out[i] = holt ? model.state[0] + static_cast<double>(i + 1) * model.state[1]
                          : model.state[0];
        }
        break;
    case MethodKind::Arima: {
        const auto [p, d, q] = model.orders;
        const std::span<const double> coef(model.params);
        const auto phi = phi_of(coef, p);
        const auto theta = theta_of(coef, p, q);
        const double c = d == 0 ? coef.back() : 0.0;
        const auto anchors = std::span<const double>(model.state).subspan(0, static_cast<std::size_t>(d));

        std::vector<double> w(model.state.begin() + d, model.state.begin() + d + p);
        std::vector<double> e(model.state.begin() + d + p, model.state.end());
        w.reserve(w.size() + horizon);
        e.reserve(e.size() + horizon);
        for (std::size_t h = 0; h < horizon; ++h) {
            double pred = c;
            for (int i = 1; i <= p; ++i) {
                pred += phi[static_cast<std::size_t>(i - 1)] * w[w.size() - static_cast<std::size_t>(i)];
            }
            for (int j = 1; j <= q; ++j) {
                pred += theta[static_cast<std::size_t>(j - 1)] * e[e.size() - static_cast<std::size_t>(j)];
            }
            w.push_back(pred);
            e.push_back(0.0);
            out[h] = pred;
        }
        for (int level = d - 1; level >= 0; --level) {
            double acc = anchors[static_cast<std::size_t>(level)];
            for (double& v : out) {
                acc += v;
                v = acc;
            }
        }
        break;
    }
    }
    return out;
}

ForecastModel select_model(std::span<const double> history, std::span<const FitConfig> candidates) {
    if (candidates.empty()) {
        throw InvalidArgument("select_model: no candidates");
    }
    std::optional<ForecastModel> best;
    for (const auto& config : candidates) {
        ForecastModel m;
        try {
            if (history.size() < min_history(config)) {
                continue;
            }
            m = fit(history, config);
        } catch (const Error&) {
            continue;
        }
        if (!best) {
            best = std::move(m);
            continue;
        }
        const double a = m.aicc;
        const double b = best->aicc;
        const bool tie = a == b || std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b));
        if ((!tie && a < b) || (tie && m.k < best->k)) {
            best = std::move(m);
        }
    }
    if (!best) {
        throw DataError("select_model: every candidate was skipped for history of length " +
                        std::to_string(history.size()));
    }
    return *best;
}

namespace arima_detail {

std::vector<double> difference(std::span<const double> values, int times) {
    std::vector<double> out(values.begin(), values.end());
    for (int k = 0; k < times; ++k) {
        if (out.size() < 2) {
            return {};
        }
        for (std::size_t i = 0; i + 1 < out.size(); ++i) {
            out[i] = out[i + 1] - out[i];
        }
        out.pop_back();
    }
    return out;
}

bool rejects_unit_root(std::span<const double> y) {
    const std::size_t n = y.size();
    if (n < 4) {
        return false;
    }
    const std::size_t count = n - 1;
    double xm = 0.0;
    double zm = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
        xm += y[t - 1];
        zm += y[t] - y[t - 1];
    }
    xm /= static_cast<double>(count);
    zm /= static_cast<double>(count);
    double sxx = 0.0;
    double sxz = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
        const double dx = y[t - 1] - xm;
        sxx += dx * dx;
        sxz += dx * (y[t] - y[t - 1] - zm);
    }
    if (sxx <= 0.0) {
        return true;
    }
    const double b = sxz / sxx;
    const double a = zm - b * xm;
    double sse = 0.0;
    double szz = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
        const double z = y[t] - y[t - 1];
        const double r = z - a - b * y[t - 1];
        sse += r * r;
        szz += (z - zm) * (z - zm);
    }
    if (sse <= 1e-24 * (szz + sxx)) {
        return b < 0.0;
    }
    const double se = std::sqrt(sse / static_cast<double>(count - 2) / sxx);
    const double tstat = b / se;
    // MacKinnon 5% critical value, constant and no trend.
    const double tt = static_cast<double>(count);
    const double critical = -2.8621 - 2.738 / tt - 8.36 / (tt * tt);
    return tstat < critical;
}

int choose_differencing(std::span<const double> values, std::span<const int> allowed) {
    if (allowed.empty()) {
        throw InvalidArgument("choose_differencing: no allowed orders");
    }
    for (std::size_t i = 0; i + 1 < allowed.size(); ++i) {
        const auto current = difference(values, allowed[i]);
        const auto next = difference(values, allowed[i + 1]);
        const double var_current = variance_of(current);
        if (next.size() < 4 || var_current <= 0.0) {
            return allowed[i];
        }
        if (rejects_unit_root(current) || variance_of(next) >= var_current) {
            return allowed[i];
        }
    }
    return allowed.back();
}

double css(std::span<const double> w, int p, int q, bool intercept, std::span<const double> coef,
           std::size_t start, std::vector<double>* residuals) {
    const std::size_t m = w.size();
    const double c = intercept ? coef[static_cast<std::size_t>(p + q)] : 0.0;
    std::vector<double> local;
    std::vector<double>& e = residuals ? *residuals : local;
    e.assign(m, 0.0);
    double sse = 0.0;
    for (std::size_t t = start; t < m; ++t) {
        double pred = c;
        for (int i = 1; i <= p; ++i) {
            pred += coef[static_cast<std::size_t>(i - 1)] * w[t - static_cast<std::size_t>(i)];
        }
        for (int j = 1; j <= q; ++j) {
            if (t >= static_cast<std::size_t>(j)) {
                pred += coef[static_cast<std::size_t>(p + j - 1)] * e[t - static_cast<std::size_t>(j)];
            }
        }
        e[t] = w[t] - pred;
        sse += e[t] * e[t];
    }
    return sse;
}

namespace {

// Roots of 1 + c1 z + c2 z^2 all satisfy |z| > 1.001.
bool roots_outside(double c1, double c2) {
    constexpr double kMinModulus = 1.001;
    if (!std::isfinite(c1) || !std::isfinite(c2)) {
        return false;
    }
    if (c2 == 0.0) {
        return c1 == 0.0 || std::abs(1.0 / c1) > kMinModulus;
    }
    const std::complex<double> disc = std::sqrt(std::complex<double>(c1 * c1 - 4.0 * c2, 0.0));
    const std::complex<double> r1 = (-c1 + disc) / (2.0 * c2);
    const std::complex<double> r2 = (-c1 - disc) / (2.0 * c2);
    return std::abs(r1) > kMinModulus && std::abs(r2) > kMinModulus;
}

} // namespace

bool admissible(std::span<const double> phi, std::span<const double> theta) {
    const double a1 = phi.size() > 0 ? -phi[0] : 0.0;
    const double a2 = phi.size() > 1 ? -phi[1] : 0.0;
    const double m1 = theta.size() > 0 ? theta[0] : 0.0;
    const double m2 = theta.size() > 1 ? theta[1] : 0.0;
    return roots_outside(a1, a2) && roots_outside(m1, m2);
}

} // namespace arima_detail

} // namespace sensorcast
