#include "plugcast/persistence.hpp"

#include <algorithm>

#include "plugcast/error.hpp"

namespace plugcast {

double persistence_predict(const PluginSeries& series, std::size_t target_step) {
    if (series.resolution != Resolution::half_hour)
        fail(Errc::alignment, "persistence forecasts run on a half-hourly series");
    if (target_step >= series.size())
        fail(Errc::domain, "target step " + std::to_string(target_step) + " is past the end of the series");
    if (target_step < 336)
        fail(Errc::insufficient_history,
             "persistence needs 7 days (336 steps) of history, target step is " + std::to_string(target_step));
    const int offset = persistence_offset(day_of_week(series.time_at(target_step)));
    return static_cast<double>(series.values[target_step - static_cast<std::size_t>(offset)]);
}

double persistence_predict(const FeatureSpec& spec, const FeatureRow& row) {
    const int offset = persistence_offset(row.dow);
    const auto it = std::find(spec.lags.begin(), spec.lags.end(), offset);
    if (it == spec.lags.end())
        fail(Errc::artifact_mismatch, "persistence needs lag " + std::to_string(offset) + " in the feature spec");
    return row.lag_values[static_cast<std::size_t>(it - spec.lags.begin())];
}

}  // namespace plugcast
