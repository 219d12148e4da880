#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "plugcast/series.hpp"

namespace plugcast {

/// Asymptotic critical values for the constant-only Dickey-Fuller regression.
struct AdfCriticalValues {
    double pct1 = -3.43;
    double pct5 = -2.86;
    double pct10 = -2.57;
};

struct AdfResult {
    double statistic = 0.0;
    std::size_t lag_order = 0;
    std::size_t nobs = 0;
    AdfCriticalValues critical_values;
    bool stationary_at_5pct = false;
};

inline constexpr std::size_t kDefaultAdfMaxLag = 20;

// Augmented Dickey-Fuller test with a constant:
//
//   dy_t = a + g*y_{t-1} + sum_{i=1..p} b_i*dy_{t-i} + e_t
//
// The statistic is the t-ratio of g. With automatic selection, p minimises
// AIC over 0..max_lag, every candidate being fitted on the common sample that
// the largest lag allows; the chosen p is then refitted on all rows it
// permits. Throws Errc::degenerate_series if the regression is singular and
// Errc::insufficient_history if fewer than max_lag + 10 values are given.
[[nodiscard]] AdfResult adf_test(std::span<const double> values, std::size_t max_lag = kDefaultAdfMaxLag);

/// Same regression with p fixed, no selection.
[[nodiscard]] AdfResult adf_test_fixed_lag(std::span<const double> values, std::size_t lag);

/// Runs the test on the unmasked values of a series, concatenated in order.
[[nodiscard]] AdfResult adf_test(const PluginSeries& series, std::size_t max_lag = kDefaultAdfMaxLag);

}  // namespace plugcast
