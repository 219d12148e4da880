#include "plugcast/series.hpp"

#include <algorithm>
#include <charconv>
#include <string>

#include "plugcast/csv.hpp"
#include "plugcast/error.hpp"

namespace plugcast {

std::size_t PluginSeries::unmasked_count() const noexcept {
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{0}));
}

TimeWindow event_occupancy(const ChargingEvent& event, TimeWindow window) noexcept {
    const Timestamp begin = std::max(event.start, window.begin);
    const Timestamp end = std::min(event.end, window.end);
    if (begin >= end) return {window.begin, window.begin};
    return {begin, end};
}

PluginSeries aggregate(std::span<const ChargingEvent> events, TimeWindow window) {
    if (window.end < window.begin) fail(Errc::domain, "aggregation window ends before it begins");
    const auto n = static_cast<std::size_t>(window.minutes());
    // Difference array over minute offsets; the prefix sum is the occupancy.
    std::vector<std::int64_t> delta(n + 1, 0);
    for (const auto& ev : events) {
        const TimeWindow occ = event_occupancy(ev, window);
        if (occ.begin == occ.end) continue;
        delta[static_cast<std::size_t>((occ.begin - window.begin).count())] += 1;
        delta[static_cast<std::size_t>((occ.end - window.begin).count())] -= 1;
    }
    PluginSeries out;
    out.start = window.begin;
    out.resolution = Resolution::minute;
    out.values.resize(n);
    out.mask.assign(n, 0);
    std::int64_t running = 0;
    for (std::size_t i = 0; i < n; ++i) {
        running += delta[i];
        out.values[i] = running;
    }
    return out;
}

PluginSeries resample_halfhour_min(const PluginSeries& minutely) {
    if (minutely.resolution != Resolution::minute)
        fail(Errc::alignment, "resample_halfhour_min expects a minute-resolution series");
    if ((minutely.start - date_of(minutely.start)).count() % 30 != 0)
        fail(Errc::alignment, "series start " + format_iso(minutely.start) + " is not on a :00 or :30 boundary");
    if (minutely.size() % 30 != 0)
        fail(Errc::alignment, "series length " + std::to_string(minutely.size()) + " is not a multiple of 30");

    PluginSeries out;
    out.start = minutely.start;
    out.resolution = Resolution::half_hour;
    const std::size_t blocks = minutely.size() / 30;
    out.values.resize(blocks);
    out.mask.resize(blocks);
    for (std::size_t k = 0; k < blocks; ++k) {
        const auto first = minutely.values.begin() + static_cast<std::ptrdiff_t>(k * 30);
        out.values[k] = *std::min_element(first, first + 30);
        const auto mfirst = minutely.mask.begin() + static_cast<std::ptrdiff_t>(k * 30);
        out.mask[k] = std::any_of(mfirst, mfirst + 30, [](std::uint8_t m) { return m != 0; }) ? 1 : 0;
    }
    return out;
}

PluginSeries apply_exclusions(const PluginSeries& series, const ExclusionConfig& config) {
    if (config.drop_first.count() < 0 || config.drop_last.count() < 0)
        fail(Errc::config, "exclusion durations must be non-negative");
    PluginSeries out = series;
    const Timestamp head_end = series.start + config.drop_first;
    const Timestamp tail_begin = series.end() - config.drop_last;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Timestamp t = out.time_at(i);
        if (t < head_end || t >= tail_begin || config.holiday_dates.contains(date_of(t))) out.mask[i] = 1;
    }
    return out;
}

void write_series_csv(std::ostream& out, const PluginSeries& series) {
    out << "timestamp,value,excluded\n";
    for (std::size_t i = 0; i < series.size(); ++i)
        out << format_iso(series.time_at(i)) << ',' << series.values[i] << ',' << int{series.mask[i]} << '\n';
}

PluginSeries read_series_csv(std::istream& in) {
    CsvReader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields.size() < 3 || trim(fields[0]) != "timestamp" || trim(fields[1]) != "value" ||
        trim(fields[2]) != "excluded")
        fail(Errc::schema, "series CSV must start with header timestamp,value,excluded");

    PluginSeries out;
    std::vector<Timestamp> times;
    while (reader.next(fields)) {
        if (fields.size() == 1 && trim(fields[0]).empty()) continue;
        const std::string where = "series CSV line " + std::to_string(reader.line());
        if (fields.size() < 3) fail(Errc::malformed, where + ": expected 3 fields");
        Timestamp t;
        if (!parse_iso_timestamp(trim(fields[0]), t)) fail(Errc::malformed, where + ": bad timestamp");
        std::int64_t v = 0;
        auto sv = trim(fields[1]);
        auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
        if (ec != std::errc{} || p != sv.data() + sv.size() || v < 0)
            fail(Errc::malformed, where + ": bad value");
        auto ex = trim(fields[2]);
        if (ex != "0" && ex != "1") fail(Errc::malformed, where + ": excluded must be 0 or 1");
        times.push_back(t);
        out.values.push_back(v);
        out.mask.push_back(ex == "1" ? 1 : 0);
    }
    if (times.empty()) fail(Errc::empty_input, "series CSV has no rows");
    out.start = times.front();
    out.resolution = Resolution::half_hour;
    if (times.size() > 1) {
        const auto spacing = (times[1] - times[0]).count();
        if (spacing == 1)
            out.resolution = Resolution::minute;
        else if (spacing != 30)
            fail(Errc::malformed, "series CSV spacing must be 1 or 30 minutes");
    }
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] != out.time_at(i))
            fail(Errc::malformed, "series CSV row " + std::to_string(i + 2) + " breaks the regular grid");
    return out;
}

}  // namespace plugcast
