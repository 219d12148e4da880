#pragma once

#include <stdexcept>
#include <string>

namespace plugcast {

enum class Errc {
    config,
    schema,
    io,
    malformed,
    alignment,
    degenerate_series,
    insufficient_history,
    domain,
    too_few_rows,
    shape,
    length_mismatch,
    empty_input,
    undefined_metric,
    undefined_correlation,
    artifact_mismatch,
    missing_artifact,
    fit,
    divergence,
};

/// Coarse failure class. The numeric values are the CLI exit codes.
enum class ErrorCategory : int {
    validation = 1,
    data = 2,
    training = 3,
};

[[nodiscard]] ErrorCategory category_of(Errc code) noexcept;
[[nodiscard]] const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }
    [[nodiscard]] ErrorCategory category() const noexcept { return category_of(code_); }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace plugcast
