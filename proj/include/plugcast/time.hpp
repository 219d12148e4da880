#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace plugcast {

// Wall-clock local time at minute resolution. No timezone or DST handling:
// every day has exactly 1440 minutes.
using Timestamp = std::chrono::sys_time<std::chrono::minutes>;
using Date = std::chrono::sys_days;

inline constexpr int kMinutesPerDay = 1440;
inline constexpr int kStepsPerDay = 48;

/// Monday = 0 ... Sunday = 6.
[[nodiscard]] int day_of_week(Timestamp ts) noexcept;
/// 1 ... 12.
[[nodiscard]] int month_of(Timestamp ts) noexcept;
[[nodiscard]] int hour_of(Timestamp ts) noexcept;
[[nodiscard]] Date date_of(Timestamp ts) noexcept;

[[nodiscard]] Timestamp make_timestamp(int year, unsigned month, unsigned day, int hour = 0,
                                       int minute = 0);

// Date patterns use the tokens YYYY, MM and DD; any other character must
// match literally, e.g. "DD/MM/YYYY". Returns false on mismatch or an
// invalid calendar date.
bool parse_date(std::string_view text, std::string_view pattern, Date& out);
// HH:MM or HH:MM:SS. Seconds are truncated.
bool parse_time_of_day(std::string_view text, std::chrono::minutes& out);
// "YYYY-MM-DDTHH:MM" with an optional ":SS" suffix, or a space instead of 'T'.
bool parse_iso_timestamp(std::string_view text, Timestamp& out);

[[nodiscard]] std::string format_date(Date d, std::string_view pattern = "YYYY-MM-DD");
[[nodiscard]] std::string format_time_of_day(Timestamp ts);
/// "YYYY-MM-DDTHH:MM".
[[nodiscard]] std::string format_iso(Timestamp ts);

}  // namespace plugcast
