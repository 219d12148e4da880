#include "plugcast/ingest.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string_view>
#include <unordered_map>

#include "plugcast/csv.hpp"
#include "plugcast/error.hpp"

namespace plugcast {

namespace {

constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);

std::size_t find_column(const std::unordered_map<std::string, std::size_t>& header, const std::string& name,
                        const char* field, bool optional) {
    if (name.empty()) {
        if (optional) return kAbsent;
        fail(Errc::schema, std::string("column mapping for '") + field + "' is empty");
    }
    auto it = header.find(name);
    if (it == header.end()) {
        if (optional) return kAbsent;
        fail(Errc::schema, std::string("missing column '") + name + "' (mapped from '" + field + "')");
    }
    return it->second;
}

bool parse_timestamp(std::string_view date, std::string_view time, std::string_view pattern, Timestamp& out) {
    Date d;
    std::chrono::minutes tod;
    if (!parse_date(trim(date), pattern, d) || !parse_time_of_day(trim(time), tod)) return false;
    out = Timestamp{d} + tod;
    return true;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
    text = trim(text);
    if (text.empty()) return false;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

ParsedEvents parse_events(std::istream& csv, const ColumnMapping& schema) {
    if (!csv) fail(Errc::io, "event stream is not readable");
    CsvReader reader(csv);
    std::vector<std::string> fields;
    ParsedEvents result;
    if (!reader.next(fields)) return result;

    std::unordered_map<std::string, std::size_t> header;
    for (std::size_t i = 0; i < fields.size(); ++i) header.emplace(std::string(trim(fields[i])), i);

    const std::size_t c_id = find_column(header, schema.event_id, "event_id", false);
    const std::size_t c_cp = find_column(header, schema.charge_point_id, "charge_point_id", true);
    const std::size_t c_conn = find_column(header, schema.connector, "connector", false);
    const std::size_t c_sd = find_column(header, schema.start_date, "start_date", false);
    const std::size_t c_st = find_column(header, schema.start_time, "start_time", false);
    const std::size_t c_ed = find_column(header, schema.end_date, "end_date", false);
    const std::size_t c_et = find_column(header, schema.end_time, "end_time", false);
    const std::size_t c_energy = find_column(header, schema.energy, "energy", true);
    const std::size_t c_org = find_column(header, schema.organization, "organization", true);
    const std::size_t width = header.size();

    while (reader.next(fields)) {
        if (fields.size() == 1 && trim(fields[0]).empty()) continue;  // blank line
        if (fields.size() < width) {
            ++result.report.malformed;
            continue;
        }
        ChargingEvent ev;
        if (!parse_timestamp(fields[c_sd], fields[c_st], schema.date_format, ev.start) ||
            !parse_timestamp(fields[c_ed], fields[c_et], schema.date_format, ev.end) || ev.end < ev.start) {
            ++result.report.malformed;
            continue;
        }
        std::string_view conn = trim(fields[c_conn]);
        bool defaulted = false;
        if (conn.empty() || conn == "NaN" || conn == "nan") {
            ev.connector = 1;
            defaulted = true;
        } else if (!parse_number(conn, ev.connector) || ev.connector < 1) {
            ++result.report.malformed;
            continue;
        }
        if (c_energy != kAbsent && !trim(fields[c_energy]).empty()) {
            if (!parse_number(fields[c_energy], ev.energy_kwh) || !(ev.energy_kwh >= 0.0) ||
                !std::isfinite(ev.energy_kwh)) {
                ++result.report.malformed;
                continue;
            }
        }
        ev.event_id = std::string(trim(fields[c_id]));
        if (c_cp != kAbsent && !trim(fields[c_cp]).empty()) ev.charge_point_id = std::string(trim(fields[c_cp]));
        if (c_org != kAbsent) ev.organization = std::string(trim(fields[c_org]));
        ev.duration_minutes = (ev.end - ev.start).count();
        if (defaulted) ++result.report.connector_defaulted;
        ++result.report.accepted;
        result.events.push_back(std::move(ev));
    }
    return result;
}

FilterResult filter_overlong(std::span<const ChargingEvent> events, std::int64_t max_duration_minutes) {
    FilterResult out;
    out.events.reserve(events.size());
    for (const auto& ev : events) {
        if (ev.duration_minutes > max_duration_minutes)
            ++out.removed;
        else
            out.events.push_back(ev);
    }
    return out;
}

ParsedEvents ingest(std::istream& csv, const ColumnMapping& schema, std::int64_t max_duration_minutes) {
    ParsedEvents parsed = parse_events(csv, schema);
    FilterResult filtered = filter_overlong(parsed.events, max_duration_minutes);
    parsed.report.accepted -= filtered.removed;
    parsed.report.rejected_overlong += filtered.removed;
    parsed.events = std::move(filtered.events);
    return parsed;
}

void write_events_csv(std::ostream& out, std::span<const ChargingEvent> events) {
    out << "event_id,charge_point_id,connector,start_date,start_time,end_date,end_time,energy,organization\n";
    char energy[32];
    for (const auto& ev : events) {
        std::snprintf(energy, sizeof energy, "%.3f", ev.energy_kwh);
        out << csv_escape(ev.event_id) << ',' << csv_escape(ev.charge_point_id.value_or("")) << ','
            << ev.connector << ',' << format_date(date_of(ev.start)) << ',' << format_time_of_day(ev.start) << ','
            << format_date(date_of(ev.end)) << ',' << format_time_of_day(ev.end) << ',' << energy << ','
            << csv_escape(ev.organization) << '\n';
    }
}

}  // namespace plugcast
