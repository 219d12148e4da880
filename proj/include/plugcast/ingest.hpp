#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plugcast/time.hpp"

namespace plugcast {

inline constexpr std::int64_t kOneWeekMinutes = 7 * kMinutesPerDay;

/// One plug-in session at a charge point connector.
struct ChargingEvent {
    std::string event_id;
    std::optional<std::string> charge_point_id;
    int connector = 1;
    Timestamp start{};
    Timestamp end{};
    double energy_kwh = 0.0;
    std::string organization;
    std::int64_t duration_minutes = 0;  // end - start

    bool operator==(const ChargingEvent&) const = default;
};

struct IngestReport {
    std::size_t accepted = 0;
    std::size_t rejected_overlong = 0;
    std::size_t connector_defaulted = 0;
    std::size_t malformed = 0;

    [[nodiscard]] std::size_t total() const noexcept {
        return accepted + rejected_overlong + malformed;
    }
    bool operator==(const IngestReport&) const = default;
};

// Maps canonical fields to CSV header names. An empty name for an optional
// field (charge_point_id, energy, organization) means the column is absent.
struct ColumnMapping {
    std::string event_id = "event_id";
    std::string charge_point_id = "charge_point_id";
    std::string connector = "connector";
    std::string start_date = "start_date";
    std::string start_time = "start_time";
    std::string end_date = "end_date";
    std::string end_time = "end_time";
    std::string energy = "energy";
    std::string organization = "organization";
    std::string date_format = "YYYY-MM-DD";
};

struct ParsedEvents {
    std::vector<ChargingEvent> events;
    IngestReport report;
};

// Rows whose timestamps, connector or energy fail to parse, or whose end
// precedes their start, are counted as malformed and dropped. A blank
// connector defaults to 1. File order is preserved.
[[nodiscard]] ParsedEvents parse_events(std::istream& csv, const ColumnMapping& schema);

struct FilterResult {
    std::vector<ChargingEvent> events;
    std::size_t removed = 0;
};

/// Drops events strictly longer than `max_duration_minutes`; an event of
/// exactly the cutoff is kept.
[[nodiscard]] FilterResult filter_overlong(std::span<const ChargingEvent> events,
                                           std::int64_t max_duration_minutes = kOneWeekMinutes);

/// parse_events followed by filter_overlong, with the report updated so that
/// accepted + rejected_overlong + malformed equals the number of data rows.
[[nodiscard]] ParsedEvents ingest(std::istream& csv, const ColumnMapping& schema,
                                  std::int64_t max_duration_minutes = kOneWeekMinutes);

/// Writes events with the default ColumnMapping header.
void write_events_csv(std::ostream& out, std::span<const ChargingEvent> events);

}  // namespace plugcast
