#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <set>
#include <span>
#include <vector>

#include "plugcast/ingest.hpp"
#include "plugcast/time.hpp"

namespace plugcast {

enum class Resolution { minute, half_hour };

[[nodiscard]] constexpr int step_minutes(Resolution r) noexcept {
    return r == Resolution::minute ? 1 : 30;
}

/// Regularly spaced aggregate plug-in counts. Masked steps stay in place so
/// calendar lags keep indexing the right slot; they are only barred from
/// being modelling targets.
struct PluginSeries {
    Timestamp start{};
    Resolution resolution = Resolution::half_hour;
    std::vector<std::int64_t> values;
    std::vector<std::uint8_t> mask;  // 1 = excluded

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] Timestamp time_at(std::size_t i) const noexcept {
        return start + std::chrono::minutes{static_cast<std::int64_t>(i) * step_minutes(resolution)};
    }
    [[nodiscard]] Timestamp end() const noexcept { return time_at(values.size()); }
    [[nodiscard]] bool masked(std::size_t i) const noexcept { return mask[i] != 0; }
    [[nodiscard]] std::size_t unmasked_count() const noexcept;

    bool operator==(const PluginSeries&) const = default;
};

/// Half-open [begin, end) interval of minutes.
struct TimeWindow {
    Timestamp begin{};
    Timestamp end{};

    [[nodiscard]] std::int64_t minutes() const noexcept { return (end - begin).count(); }
};

/// Sparse occupancy indicator: minutes [begin, end) are 1, all others 0.
/// Empty (begin == end) when the event does not touch the window.
[[nodiscard]] TimeWindow event_occupancy(const ChargingEvent& event, TimeWindow window) noexcept;

/// Minute-resolution count of events plugged in at each minute of the window.
[[nodiscard]] PluginSeries aggregate(std::span<const ChargingEvent> events, TimeWindow window);

/// Minimum over each 30-minute block; a block is masked if any minute is.
[[nodiscard]] PluginSeries resample_halfhour_min(const PluginSeries& minutely);

struct ExclusionConfig {
    std::chrono::minutes drop_first{7 * kMinutesPerDay};
    std::chrono::minutes drop_last{14 * kMinutesPerDay};
    std::set<Date> holiday_dates;
};

/// Sets mask bits; never touches values. Existing mask bits are kept.
[[nodiscard]] PluginSeries apply_exclusions(const PluginSeries& series, const ExclusionConfig& config);

/// CSV with header `timestamp,value,excluded`.
void write_series_csv(std::ostream& out, const PluginSeries& series);
/// Reads what write_series_csv writes. Resolution is inferred from the
/// spacing of the first two rows (a single row is taken as half-hourly).
[[nodiscard]] PluginSeries read_series_csv(std::istream& in);

}  // namespace plugcast
