#include "plugcast/error.hpp"

namespace plugcast {

ErrorCategory category_of(Errc code) noexcept {
    switch (code) {
        case Errc::config:
        case Errc::domain:
        case Errc::shape:
        case Errc::length_mismatch:
            return ErrorCategory::validation;
        case Errc::fit:
        case Errc::divergence:
            return ErrorCategory::training;
        default:
            return ErrorCategory::data;
    }
}

const char* errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::config: return "config";
        case Errc::schema: return "schema";
        case Errc::io: return "io";
        case Errc::malformed: return "malformed";
        case Errc::alignment: return "alignment";
        case Errc::degenerate_series: return "degenerate_series";
        case Errc::insufficient_history: return "insufficient_history";
        case Errc::domain: return "domain";
        case Errc::too_few_rows: return "too_few_rows";
        case Errc::shape: return "shape";
        case Errc::length_mismatch: return "length_mismatch";
        case Errc::empty_input: return "empty_input";
        case Errc::undefined_metric: return "undefined_metric";
        case Errc::undefined_correlation: return "undefined_correlation";
        case Errc::artifact_mismatch: return "artifact_mismatch";
        case Errc::missing_artifact: return "missing_artifact";
        case Errc::fit: return "fit";
        case Errc::divergence: return "divergence";
    }
    return "unknown";
}

}  // namespace plugcast
