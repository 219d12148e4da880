#include "plugcast/features.hpp"

#include <cmath>
#include <numeric>

#include "plugcast/error.hpp"
#include "plugcast/rng.hpp"

namespace plugcast {

std::size_t FeatureSpec::input_width() const noexcept {
    return lags.size() + (use_dow_onehot ? 7 : 0) + (use_month_onehot ? 12 : 0) + (use_hour_onehot ? 24 : 0);
}

void FeatureSpec::validate() const {
    if (lags.empty()) fail(Errc::config, "feature spec needs at least one lag");
    for (std::size_t i = 0; i < lags.size(); ++i) {
        if (lags[i] <= 0) fail(Errc::config, "lags must be strictly positive");
        if (i > 0 && lags[i] <= lags[i - 1]) fail(Errc::config, "lags must be strictly increasing");
    }
}

const char* split_name(Split s) noexcept {
    switch (s) {
        case Split::train: return "train";
        case Split::validation: return "validation";
        case Split::test: return "test";
        case Split::unassigned: break;
    }
    return "unassigned";
}

std::vector<std::size_t> FeatureMatrix::indices(Split s) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < split.size(); ++i)
        if (split[i] == s) out.push_back(i);
    return out;
}

FeatureMatrix build_matrix(const PluginSeries& series, const FeatureSpec& spec) {
    spec.validate();
    if (series.resolution != Resolution::half_hour)
        fail(Errc::alignment, "feature rows are built from a half-hourly series");
    const auto max_lag = static_cast<std::size_t>(spec.max_lag());
    if (series.size() < max_lag)
        fail(Errc::insufficient_history, "series has " + std::to_string(series.size()) +
                                             " steps but the largest lag is " + std::to_string(max_lag));
    FeatureMatrix m;
    m.spec = spec;
    for (std::size_t step = max_lag; step < series.size(); ++step) {
        if (series.masked(step)) continue;
        FeatureRow row;
        row.target = static_cast<double>(series.values[step]);
        row.lag_values.reserve(spec.lags.size());
        for (int lag : spec.lags) row.lag_values.push_back(static_cast<double>(series.values[step - lag]));
        row.timestamp = series.time_at(step);
        row.dow = day_of_week(row.timestamp);
        row.month = month_of(row.timestamp);
        row.hour = hour_of(row.timestamp);
        row.step = step;
        m.rows.push_back(std::move(row));
    }
    return m;
}

std::vector<double> one_hot(int index, int cardinality) {
    if (cardinality <= 0 || index < 0 || index >= cardinality)
        fail(Errc::domain, "one-hot index " + std::to_string(index) + " outside [0, " +
                               std::to_string(cardinality) + ")");
    std::vector<double> v(static_cast<std::size_t>(cardinality), 0.0);
    v[static_cast<std::size_t>(index)] = 1.0;
    return v;
}

FeatureMatrix split_rows(FeatureMatrix matrix, SplitRatios ratios, std::uint64_t seed) {
    if (ratios.train < 0 || ratios.validation < 0 || ratios.test < 0 ||
        std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9)
        fail(Errc::config, "split ratios must be non-negative and sum to 1");
    const std::size_t n = matrix.size();
    if (n < 10) fail(Errc::too_few_rows, "need at least 10 feature rows to split, got " + std::to_string(n));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);

    const auto n_train = static_cast<std::size_t>(std::floor(ratios.train * static_cast<double>(n) + 1e-9));
    const auto n_val = static_cast<std::size_t>(std::floor(ratios.validation * static_cast<double>(n) + 1e-9));
    matrix.split.assign(n, Split::test);
    for (std::size_t pos = 0; pos < n; ++pos) {
        if (pos < n_train)
            matrix.split[order[pos]] = Split::train;
        else if (pos < n_train + n_val)
            matrix.split[order[pos]] = Split::validation;
    }
    return matrix;
}

FeatureScaler fit_scaler(const FeatureMatrix& matrix, std::span<const std::size_t> rows) {
    const std::size_t k = matrix.spec.lags.size();
    FeatureScaler s;
    s.mean.assign(k, 0.0);
    s.stddev.assign(k, 1.0);
    if (rows.empty()) return s;
    const double n = static_cast<double>(rows.size());
    for (std::size_t j = 0; j < k; ++j) {
        double sum = 0.0;
        for (std::size_t r : rows) sum += matrix.rows[r].lag_values[j];
        const double mean = sum / n;
        double ss = 0.0;
        for (std::size_t r : rows) {
            const double d = matrix.rows[r].lag_values[j] - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / n);
        s.mean[j] = mean;
        s.stddev[j] = sd > 0.0 ? sd : 1.0;
    }
    return s;
}

void encode_row(const FeatureRow& row, const FeatureSpec& spec, const FeatureScaler& scaler, std::span<double> out) {
    if (out.size() != spec.input_width() || row.lag_values.size() != spec.lags.size())
        fail(Errc::shape, "feature row does not match the feature spec width");
    std::fill(out.begin(), out.end(), 0.0);
    std::size_t pos = 0;
    for (std::size_t j = 0; j < row.lag_values.size(); ++j) out[pos++] = scaler.apply(j, row.lag_values[j]);
    if (spec.use_dow_onehot) {
        out[pos + static_cast<std::size_t>(row.dow)] = 1.0;
        pos += 7;
    }
    if (spec.use_month_onehot) {
        out[pos + static_cast<std::size_t>(row.month - 1)] = 1.0;
        pos += 12;
    }
    if (spec.use_hour_onehot) out[pos + static_cast<std::size_t>(row.hour)] = 1.0;
}

void write_matrix_csv(std::ostream& out, const FeatureMatrix& matrix) {
    const auto& spec = matrix.spec;
    out << "timestamp,target";
    for (int lag : spec.lags) out << ",lag_" << lag;
    out << ",dow,month,hour";
    if (spec.use_dow_onehot)
        for (int d = 0; d < 7; ++d) out << ",dow_" << d;
    if (spec.use_month_onehot)
        for (int m = 1; m <= 12; ++m) out << ",month_" << m;
    if (spec.use_hour_onehot)
        for (int h = 0; h < 24; ++h) out << ",hour_" << h;
    out << ",split\n";
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        const auto& r = matrix.rows[i];
        out << format_iso(r.timestamp) << ',' << r.target;
        for (double v : r.lag_values) out << ',' << v;
        out << ',' << r.dow << ',' << r.month << ',' << r.hour;
        if (spec.use_dow_onehot)
            for (int d = 0; d < 7; ++d) out << ',' << (d == r.dow ? 1 : 0);
        if (spec.use_month_onehot)
            for (int m = 1; m <= 12; ++m) out << ',' << (m == r.month ? 1 : 0);
        if (spec.use_hour_onehot)
            for (int h = 0; h < 24; ++h) out << ',' << (h == r.hour ? 1 : 0);
        out << ',' << split_name(i < matrix.split.size() ? matrix.split[i] : Split::unassigned) << '\n';
    }
}

}  // namespace plugcast
