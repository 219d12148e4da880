#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "plugcast/series.hpp"

namespace plugcast {

/// Which inputs a forecaster sees. Lags are in half-hour steps before the target.
struct FeatureSpec {
    std::vector<int> lags{48, 144, 336};
    bool use_dow_onehot = true;
    bool use_month_onehot = false;
    bool use_hour_onehot = false;

    [[nodiscard]] int max_lag() const { return lags.empty() ? 0 : lags.back(); }
    /// Number of inputs fed to a network: lags plus the enabled one-hot blocks.
    [[nodiscard]] std::size_t input_width() const noexcept;
    /// Throws Errc::config unless lags are strictly positive and increasing.
    void validate() const;

    bool operator==(const FeatureSpec&) const = default;
};

struct FeatureRow {
    double target = 0.0;
    std::vector<double> lag_values;
    int dow = 0;    // Monday = 0
    int month = 1;  // 1..12
    int hour = 0;
    Timestamp timestamp{};
    std::size_t step = 0;  // index of the target in the source series

    bool operator==(const FeatureRow&) const = default;
};

enum class Split : std::uint8_t { unassigned, train, validation, test };

[[nodiscard]] const char* split_name(Split s) noexcept;

struct FeatureMatrix {
    FeatureSpec spec;
    std::vector<FeatureRow> rows;
    std::vector<Split> split;  // empty until split_rows

    [[nodiscard]] std::size_t size() const noexcept { return rows.size(); }
    [[nodiscard]] std::vector<std::size_t> indices(Split s) const;

    bool operator==(const FeatureMatrix&) const = default;
};

/// One row per unmasked half-hour step that has every lag inside the series.
/// Throws Errc::insufficient_history when the series is shorter than the
/// largest lag.
[[nodiscard]] FeatureMatrix build_matrix(const PluginSeries& series, const FeatureSpec& spec);

[[nodiscard]] std::vector<double> one_hot(int index, int cardinality);

struct SplitRatios {
    double train = 0.8;
    double validation = 0.1;
    double test = 0.1;
};

// Shuffles row positions with Rng(seed) (Fisher-Yates) and labels the first
// floor(train*n) positions train, the next floor(validation*n) validation
// and the rest test. Row order itself is left chronological.
[[nodiscard]] FeatureMatrix split_rows(FeatureMatrix matrix, SplitRatios ratios, std::uint64_t seed);

/// Per-lag standardisation fitted on training rows only.
struct FeatureScaler {
    std::vector<double> mean;
    std::vector<double> stddev;

    [[nodiscard]] double apply(std::size_t lag_index, double value) const noexcept {
        return (value - mean[lag_index]) / stddev[lag_index];
    }
    bool operator==(const FeatureScaler&) const = default;
};

/// Population mean and standard deviation of each lag column over the given
/// rows. A zero standard deviation is replaced by 1.
[[nodiscard]] FeatureScaler fit_scaler(const FeatureMatrix& matrix, std::span<const std::size_t> rows);

/// Network input for a row: scaled lags, then one-hot dow, month, hour blocks
/// as enabled in `spec`.
void encode_row(const FeatureRow& row, const FeatureSpec& spec, const FeatureScaler& scaler,
                std::span<double> out);

void write_matrix_csv(std::ostream& out, const FeatureMatrix& matrix);

}  // namespace plugcast
