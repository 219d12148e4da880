#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "plugcast/features.hpp"

namespace plugcast {

/// Per-day-of-week linear combination of lagged values. No intercept unless
/// `intercept` is set.
struct GlmModel {
    std::vector<int> lags{48, 144, 336};
    std::array<std::vector<double>, 7> coefficients;  // [dow][lag]
    bool intercept = false;
    std::array<double, 7> intercepts{};

    bool operator==(const GlmModel&) const = default;
};

// Ordinary least squares on unscaled lags, one independent fit per
// day-of-week over `rows`. Throws Errc::fit naming the day if any day has
// fewer rows than coefficients or a rank-deficient design.
[[nodiscard]] GlmModel glm_fit(const FeatureMatrix& matrix, std::span<const std::size_t> rows,
                               bool intercept = false);
/// Fits on the training split.
[[nodiscard]] GlmModel glm_fit(const FeatureMatrix& matrix, bool intercept = false);

[[nodiscard]] double glm_predict(const GlmModel& model, const FeatureRow& row);

}  // namespace plugcast
