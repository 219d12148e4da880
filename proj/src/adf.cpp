#include "plugcast/adf.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "plugcast/error.hpp"
#include "plugcast/linalg.hpp"

namespace plugcast {

namespace {

struct AdfFit {
    LeastSquaresFit ls;
    std::size_t nobs = 0;
    std::size_t k = 0;
};

// Regression of dy_t on [1, y_{t-1}, dy_{t-1}, ..., dy_{t-p}] for t = first..n-1.
AdfFit fit_regression(std::span<const double> y, std::size_t lag, std::size_t first) {
    const std::size_t n = y.size();
    const std::size_t nobs = n - first;
    const std::size_t k = lag + 2;
    Eigen::MatrixXd x(nobs, k);
    Eigen::VectorXd dy(nobs);
    for (std::size_t r = 0; r < nobs; ++r) {
        const std::size_t t = first + r;
        dy(r) = y[t] - y[t - 1];
        x(r, 0) = 1.0;
        x(r, 1) = y[t - 1];
        for (std::size_t i = 1; i <= lag; ++i) x(r, 1 + i) = y[t - i] - y[t - i - 1];
    }
    AdfFit fit;
    fit.nobs = nobs;
    fit.k = k;
    if (!least_squares(x, dy, fit.ls))
        fail(Errc::degenerate_series, "ADF regression is singular (constant or degenerate series)");
    return fit;
}

double aic(const AdfFit& fit) {
    const double n = static_cast<double>(fit.nobs);
    const double llf = -0.5 * n * (std::log(2.0 * std::numbers::pi) + std::log(fit.ls.ssr / n) + 1.0);
    return -2.0 * llf + 2.0 * static_cast<double>(fit.k);
}

AdfResult finish(const AdfFit& fit, std::size_t lag) {
    const double dof = static_cast<double>(fit.nobs - fit.k);
    const double sigma2 = fit.ls.ssr / dof;
    const double se = std::sqrt(sigma2 * fit.ls.xtx_inverse(1, 1));
    AdfResult out;
    out.statistic = fit.ls.coefficients(1) / se;
    if (!std::isfinite(out.statistic))
        fail(Errc::degenerate_series, "ADF statistic is not finite (perfect fit)");
    out.lag_order = lag;
    out.nobs = fit.nobs;
    out.stationary_at_5pct = out.statistic < out.critical_values.pct5;
    return out;
}

void check_input(std::span<const double> values, std::size_t max_lag) {
    if (values.size() < max_lag + 10)
        fail(Errc::insufficient_history, "ADF test needs at least max_lag + 10 = " + std::to_string(max_lag + 10) +
                                             " values, got " + std::to_string(values.size()));
    for (double v : values)
        if (!std::isfinite(v)) fail(Errc::domain, "ADF input contains a non-finite value");
}

}  // namespace

AdfResult adf_test_fixed_lag(std::span<const double> values, std::size_t lag) {
    check_input(values, lag);
    return finish(fit_regression(values, lag, lag + 1), lag);
}

AdfResult adf_test(std::span<const double> values, std::size_t max_lag) {
    check_input(values, max_lag);
    std::size_t best_lag = 0;
    double best_aic = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p <= max_lag; ++p) {
        const double a = aic(fit_regression(values, p, max_lag + 1));
        if (a < best_aic) {
            best_aic = a;
            best_lag = p;
        }
    }
    return finish(fit_regression(values, best_lag, best_lag + 1), best_lag);
}

AdfResult adf_test(const PluginSeries& series, std::size_t max_lag) {
    std::vector<double> values;
    values.reserve(series.size());
    for (std::size_t i = 0; i < series.size(); ++i)
        if (!series.masked(i)) values.push_back(static_cast<double>(series.values[i]));
    return adf_test(values, max_lag);
}

}  // namespace plugcast
