#include "plugcast/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "plugcast/csv.hpp"
#include "plugcast/error.hpp"

namespace plugcast {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        fail(Errc::length_mismatch,
             "lengths differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
}

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::vector<double> residuals(std::span<const double> predictions, std::span<const double> actuals) {
    check_lengths(predictions, actuals);
    std::vector<double> r(predictions.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = predictions[i] - actuals[i];
    return r;
}

double MetricSet::require_mape() const {
    if (!mape_pct) fail(Errc::undefined_metric, "MAPE is undefined: every actual value is zero");
    return *mape_pct;
}

MetricSet metrics(std::span<const double> predictions, std::span<const double> actuals) {
    check_lengths(predictions, actuals);
    if (predictions.empty()) fail(Errc::empty_input, "metrics need at least one prediction");
    MetricSet m;
    m.n = predictions.size();
    double sq = 0.0, abs_sum = 0.0, pct = 0.0;
    for (std::size_t i = 0; i < m.n; ++i) {
        const double r = predictions[i] - actuals[i];
        sq += r * r;
        abs_sum += std::abs(r);
        if (actuals[i] != 0.0)
            pct += std::abs(r) / std::abs(actuals[i]);
        else
            ++m.n_skipped_zero_actual;
    }
    const double n = static_cast<double>(m.n);
    m.rmse = std::sqrt(sq / n);
    m.mae = abs_sum / n;
    const std::size_t used = m.n - m.n_skipped_zero_actual;
    if (used > 0) m.mape_pct = 100.0 * pct / static_cast<double>(used);
    return m;
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) fail(Errc::empty_input, "quantile of an empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

ResidualStats residual_stats(std::span<const double> r) {
    if (r.empty()) fail(Errc::empty_input, "residual statistics of an empty sample");
    std::vector<double> sorted(r.begin(), r.end());
    std::sort(sorted.begin(), sorted.end());
    ResidualStats s;
    s.mean = mean_of(r);
    double ss = 0.0;
    for (double v : r) ss += (v - s.mean) * (v - s.mean);
    s.std_dev = std::sqrt(ss / static_cast<double>(r.size()));
    s.median = quantile_sorted(sorted, 0.5);
    s.range = sorted.back() - sorted.front();
    s.iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    return s;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    check_lengths(x, y);
    if (x.size() < 2) fail(Errc::undefined_correlation, "correlation needs at least two points");
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) fail(Errc::undefined_correlation, "correlation undefined for zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    check_lengths(x, y);
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

std::vector<DayCorrelation> lag_correlation_by_day(const PluginSeries& series) {
    std::array<std::vector<double>, 7> today, yesterday;
    const std::size_t lag = series.resolution == Resolution::half_hour ? 48 : kMinutesPerDay;
    for (std::size_t t = lag; t < series.size(); ++t) {
        if (series.masked(t) || series.masked(t - lag)) continue;
        const auto d = static_cast<std::size_t>(day_of_week(series.time_at(t)));
        today[d].push_back(static_cast<double>(series.values[t]));
        yesterday[d].push_back(static_cast<double>(series.values[t - lag]));
    }
    std::vector<DayCorrelation> out;
    for (int d = 0; d < 7; ++d) {
        DayCorrelation row;
        row.dow = d;
        const auto& a = today[static_cast<std::size_t>(d)];
        const auto& b = yesterday[static_cast<std::size_t>(d)];
        row.pairs = a.size();
        if (a.size() >= 3) {
            try {
                row.pearson = pearson(a, b);
                row.spearman = spearman(a, b);
            } catch (const Error& e) {
                if (e.code() != Errc::undefined_correlation) throw;
                row.pearson.reset();
                row.spearman.reset();
            }
        }
        out.push_back(row);
    }
    return out;
}

const char* group_key_name(GroupKey key) noexcept {
    switch (key) {
        case GroupKey::day_of_week: return "dow";
        case GroupKey::month: return "month";
        case GroupKey::hour: return "hour";
    }
    return "";
}

FiveNumber five_number(std::vector<double> values) {
    if (values.empty()) fail(Errc::empty_input, "five-number summary of an empty sample");
    std::sort(values.begin(), values.end());
    return {values.front(), quantile_sorted(values, 0.25), quantile_sorted(values, 0.5),
            quantile_sorted(values, 0.75), values.back(), values.size()};
}

GroupedDistribution grouped_distribution(const PluginSeries& series, GroupKey key) {
    std::array<std::vector<double>, 24> groups;  // large enough for any key
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series.masked(i)) continue;
        const Timestamp t = series.time_at(i);
        int g = 0;
        switch (key) {
            case GroupKey::day_of_week: g = day_of_week(t); break;
            case GroupKey::month: g = month_of(t) - 1; break;
            case GroupKey::hour: g = hour_of(t); break;
        }
        groups[static_cast<std::size_t>(g)].push_back(static_cast<double>(series.values[i]));
    }
    GroupedDistribution out;
    out.key = key;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].empty()) continue;
        const int label = key == GroupKey::month ? static_cast<int>(g) + 1 : static_cast<int>(g);
        out.groups.push_back({label, five_number(std::move(groups[g]))});
    }
    return out;
}

std::vector<double> align_exogenous(const PluginSeries& series, const ExogenousSeries& exo) {
    if (exo.times.size() != exo.values.size()) fail(Errc::length_mismatch, "exogenous times and values differ");
    for (std::size_t i = 1; i < exo.times.size(); ++i)
        if (exo.times[i] <= exo.times[i - 1]) fail(Errc::malformed, "exogenous timestamps must increase strictly");

    std::vector<std::size_t> finite;
    for (std::size_t i = 0; i < exo.values.size(); ++i)
        if (std::isfinite(exo.values[i])) finite.push_back(i);

    std::vector<double> out(series.size(), std::numeric_limits<double>::quiet_NaN());
    std::size_t k = 0;  // first finite point with time >= t
    for (std::size_t i = 0; i < series.size(); ++i) {
        const Timestamp t = series.time_at(i);
        while (k < finite.size() && exo.times[finite[k]] < t) ++k;
        if (k == finite.size()) break;
        const std::size_t right = finite[k];
        if (exo.times[right] == t) {
            out[i] = exo.values[right];
            continue;
        }
        if (k == 0) continue;
        const std::size_t left = finite[k - 1];
        const double span = static_cast<double>((exo.times[right] - exo.times[left]).count());
        const double w = static_cast<double>((t - exo.times[left]).count()) / span;
        out[i] = exo.values[left] + w * (exo.values[right] - exo.values[left]);
    }
    return out;
}

CorrelationPair exogenous_correlation(const PluginSeries& series, const ExogenousSeries& exo) {
    const auto aligned = align_exogenous(series, exo);
    std::vector<double> a, b;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series.masked(i) || !std::isfinite(aligned[i])) continue;
        a.push_back(static_cast<double>(series.values[i]));
        b.push_back(aligned[i]);
    }
    if (a.empty()) fail(Errc::empty_input, "exogenous series does not overlap any unmasked step");
    return {pearson(a, b), spearman(a, b), a.size()};
}

ExogenousSeries read_exogenous_csv(std::istream& in) {
    CsvReader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields.size() < 2 || trim(fields[0]) != "timestamp" || trim(fields[1]) != "value")
        fail(Errc::schema, "exogenous CSV must start with header timestamp,value");
    ExogenousSeries exo;
    while (reader.next(fields)) {
        if (fields.size() == 1 && trim(fields[0]).empty()) continue;
        const std::string where = "exogenous CSV line " + std::to_string(reader.line());
        if (fields.size() < 2) fail(Errc::malformed, where + ": expected 2 fields");
        Timestamp t;
        if (!parse_iso_timestamp(trim(fields[0]), t)) fail(Errc::malformed, where + ": bad timestamp");
        const auto sv = trim(fields[1]);
        double v = std::numeric_limits<double>::quiet_NaN();
        if (!sv.empty() && sv != "nan" && sv != "NaN" && sv != "NA") {
            auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
            if (ec != std::errc{} || p != sv.data() + sv.size()) fail(Errc::malformed, where + ": bad value");
        }
        exo.times.push_back(t);
        exo.values.push_back(v);
    }
    return exo;
}

}  // namespace plugcast
