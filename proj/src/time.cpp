#include "plugcast/time.hpp"

#include <cstdio>

namespace plugcast {

namespace chr = std::chrono;

namespace {

bool read_digits(std::string_view text, std::size_t pos, std::size_t count, int& out) {
    if (pos + count > text.size()) return false;
    int v = 0;
    for (std::size_t i = 0; i < count; ++i) {
        char c = text[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

}  // namespace

Date date_of(Timestamp ts) noexcept { return chr::floor<chr::days>(ts); }

int day_of_week(Timestamp ts) noexcept {
    return static_cast<int>(chr::weekday{date_of(ts)}.iso_encoding()) - 1;
}

int month_of(Timestamp ts) noexcept {
    return static_cast<int>(static_cast<unsigned>(chr::year_month_day{date_of(ts)}.month()));
}

int hour_of(Timestamp ts) noexcept {
    return static_cast<int>((ts - date_of(ts)).count() / 60);
}

Timestamp make_timestamp(int year, unsigned month, unsigned day, int hour, int minute) {
    Date d = chr::year{year} / chr::month{month} / chr::day{day};
    return Timestamp{d} + chr::hours{hour} + chr::minutes{minute};
}

bool parse_date(std::string_view text, std::string_view pattern, Date& out) {
    int y = -1, m = -1, d = -1;
    std::size_t ti = 0;
    for (std::size_t pi = 0; pi < pattern.size();) {
        std::string_view rest = pattern.substr(pi);
        if (rest.starts_with("YYYY")) {
            if (!read_digits(text, ti, 4, y)) return false;
            ti += 4;
            pi += 4;
        } else if (rest.starts_with("MM")) {
            if (!read_digits(text, ti, 2, m)) return false;
            ti += 2;
            pi += 2;
        } else if (rest.starts_with("DD")) {
            if (!read_digits(text, ti, 2, d)) return false;
            ti += 2;
            pi += 2;
        } else {
            if (ti >= text.size() || text[ti] != pattern[pi]) return false;
            ++ti;
            ++pi;
        }
    }
    if (ti != text.size() || y < 0 || m < 0 || d < 0) return false;
    chr::year_month_day ymd{chr::year{y}, chr::month{static_cast<unsigned>(m)},
                            chr::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return false;
    out = Date{ymd};
    return true;
}

bool parse_time_of_day(std::string_view text, chr::minutes& out) {
    int h = 0, m = 0, s = 0;
    if (text.size() != 5 && text.size() != 8) return false;
    if (!read_digits(text, 0, 2, h) || text[2] != ':' || !read_digits(text, 3, 2, m)) return false;
    if (text.size() == 8 && (text[5] != ':' || !read_digits(text, 6, 2, s))) return false;
    if (h > 23 || m > 59 || s > 59) return false;
    out = chr::hours{h} + chr::minutes{m};
    return true;
}

bool parse_iso_timestamp(std::string_view text, Timestamp& out) {
    if (text.size() < 16 || (text[10] != 'T' && text[10] != ' ')) return false;
    Date d;
    chr::minutes tod;
    if (!parse_date(text.substr(0, 10), "YYYY-MM-DD", d) || !parse_time_of_day(text.substr(11), tod))
        return false;
    out = Timestamp{d} + tod;
    return true;
}

std::string format_date(Date d, std::string_view pattern) {
    chr::year_month_day ymd{d};
    char buf[8];
    std::string out;
    for (std::size_t pi = 0; pi < pattern.size();) {
        std::string_view rest = pattern.substr(pi);
        if (rest.starts_with("YYYY")) {
            std::snprintf(buf, sizeof buf, "%04d", static_cast<int>(ymd.year()));
            out += buf;
            pi += 4;
        } else if (rest.starts_with("MM")) {
            std::snprintf(buf, sizeof buf, "%02u", static_cast<unsigned>(ymd.month()));
            out += buf;
            pi += 2;
        } else if (rest.starts_with("DD")) {
            std::snprintf(buf, sizeof buf, "%02u", static_cast<unsigned>(ymd.day()));
            out += buf;
            pi += 2;
        } else {
            out += pattern[pi++];
        }
    }
    return out;
}

std::string format_time_of_day(Timestamp ts) {
    auto mins = (ts - date_of(ts)).count();
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02d:%02d", static_cast<int>(mins / 60), static_cast<int>(mins % 60));
    return buf;
}

std::string format_iso(Timestamp ts) {
    return format_date(date_of(ts)) + "T" + format_time_of_day(ts);
}

}  // namespace plugcast
