#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace plugcast {

// Minimal RFC 4180 reader: comma-delimited, double-quoted fields with ""
// escapes, quoted newlines, LF or CRLF record endings.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    // Reads the next record into `fields`. Returns false at end of input.
    // Throws Error(Errc::malformed) on an unterminated quoted field.
    bool next(std::vector<std::string>& fields);

    /// 1-based line on which the last returned record started.
    [[nodiscard]] std::size_t line() const noexcept { return record_line_; }

private:
    std::istream& in_;
    std::size_t line_ = 1;
    std::size_t record_line_ = 0;
};

/// Quotes a field only when it contains a delimiter, quote or newline.
[[nodiscard]] std::string csv_escape(std::string_view field);

/// Shortest decimal text that parses back to exactly `v`; "nan" for NaN.
[[nodiscard]] std::string format_number(double v);

[[nodiscard]] std::string_view trim(std::string_view s) noexcept;

}  // namespace plugcast
