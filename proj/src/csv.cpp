#include "plugcast/csv.hpp"

#include <charconv>
#include <cmath>

#include "plugcast/error.hpp"

namespace plugcast {

bool CsvReader::next(std::vector<std::string>& fields) {
    fields.clear();
    int c = in_.get();
    if (c == EOF) return false;
    record_line_ = line_;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    for (;; c = in_.get()) {
        if (quoted) {
            if (c == EOF) {
                fail(Errc::malformed, "line " + std::to_string(record_line_) + ": unterminated quoted field");
            }
            if (c == '"') {
                if (in_.peek() == '"') {
                    in_.get();
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line_;
                field += static_cast<char>(c);
            }
            continue;
        }
        if (c == EOF || c == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            fields.push_back(std::move(field));
            if (c == '\n') ++line_;
            return true;
        }
        if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            field_started = false;
        } else if (c == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else {
            field += static_cast<char>(c);
            field_started = true;
        }
    }
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string_view trim(std::string_view s) noexcept {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace plugcast
