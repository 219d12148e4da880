#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "plugcast/series.hpp"

namespace plugcast {

/// r_t = prediction - actual. Negative residuals are overestimates.
[[nodiscard]] std::vector<double> residuals(std::span<const double> predictions,
                                            std::span<const double> actuals);

struct MetricSet {
    double rmse = 0.0;
    std::optional<double> mape_pct;  // empty when every actual is zero
    double mae = 0.0;
    std::size_t n = 0;
    std::size_t n_skipped_zero_actual = 0;

    /// Throws Errc::undefined_metric when MAPE is undefined.
    [[nodiscard]] double require_mape() const;
    bool operator==(const MetricSet&) const = default;
};

// MAPE is averaged over non-zero actuals only; the number of skipped points
// is reported. Throws Errc::length_mismatch or Errc::empty_input.
[[nodiscard]] MetricSet metrics(std::span<const double> predictions, std::span<const double> actuals);

struct ResidualStats {
    double mean = 0.0;
    double median = 0.0;
    double std_dev = 0.0;  // population
    double range = 0.0;    // max - min
    double iqr = 0.0;

    bool operator==(const ResidualStats&) const = default;
};

[[nodiscard]] ResidualStats residual_stats(std::span<const double> residuals);

/// Linear interpolation between order statistics of sorted data, q in [0, 1].
[[nodiscard]] double quantile_sorted(std::span<const double> sorted, double q);

/// Throws Errc::undefined_correlation for zero variance or fewer than 2 points.
[[nodiscard]] double pearson(std::span<const double> x, std::span<const double> y);
/// Pearson of average ranks; ties share the mean of their ranks.
[[nodiscard]] double spearman(std::span<const double> x, std::span<const double> y);
/// 1-based average ranks.
[[nodiscard]] std::vector<double> average_ranks(std::span<const double> x);

struct DayCorrelation {
    int dow = 0;
    std::size_t pairs = 0;
    std::optional<double> pearson;
    std::optional<double> spearman;

    bool operator==(const DayCorrelation&) const = default;
};

// For each day-of-week, correlates the values on that day with the values
// 48 steps earlier. A pair is dropped if either step is masked. Days with
// fewer than 3 pairs or zero variance get empty coefficients.
[[nodiscard]] std::vector<DayCorrelation> lag_correlation_by_day(const PluginSeries& series);

enum class GroupKey { day_of_week, month, hour };

[[nodiscard]] const char* group_key_name(GroupKey key) noexcept;  // "dow", "month", "hour"

struct FiveNumber {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    std::size_t n = 0;

    bool operator==(const FiveNumber&) const = default;
};

[[nodiscard]] FiveNumber five_number(std::vector<double> values);

struct GroupStats {
    int group = 0;  // dow 0..6, month 1..12 or hour 0..23
    FiveNumber stats;

    bool operator==(const GroupStats&) const = default;
};

struct GroupedDistribution {
    GroupKey key = GroupKey::day_of_week;
    std::vector<GroupStats> groups;  // ascending group, empty groups omitted

    bool operator==(const GroupedDistribution&) const = default;
};

[[nodiscard]] GroupedDistribution grouped_distribution(const PluginSeries& series, GroupKey key);

/// Irregular exogenous observations; NaN marks a missing value.
struct ExogenousSeries {
    std::vector<Timestamp> times;  // strictly increasing
    std::vector<double> values;
};

/// Linear interpolation onto each series step inside the exogenous span.
/// Steps outside the span, or with no finite neighbour on one side, yield NaN.
[[nodiscard]] std::vector<double> align_exogenous(const PluginSeries& series, const ExogenousSeries& exo);

struct CorrelationPair {
    double pearson = 0.0;
    double spearman = 0.0;
    std::size_t n = 0;
};

/// Correlates unmasked steps with a finite aligned exogenous value. Throws
/// Errc::empty_input if the join is empty.
[[nodiscard]] CorrelationPair exogenous_correlation(const PluginSeries& series, const ExogenousSeries& exo);

/// CSV with header `timestamp,value`; blank or "nan" values are missing.
[[nodiscard]] ExogenousSeries read_exogenous_csv(std::istream& in);

}  // namespace plugcast
