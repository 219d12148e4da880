#pragma once

#include <cstddef>

#include "plugcast/features.hpp"
#include "plugcast/series.hpp"

namespace plugcast {

// Day-of-week persistence rule:
//   Tue, Wed, Thu, Fri, Sun -> same slot one day earlier   (48 steps)
//   Mon                     -> previous Friday              (144 steps)
//   Sat                     -> previous Saturday            (336 steps)
struct PersistenceModel {
    bool operator==(const PersistenceModel&) const = default;
};

/// Steps back from the target used for a target on `dow` (Monday = 0).
[[nodiscard]] constexpr int persistence_offset(int dow) noexcept {
    switch (dow) {
        case 0: return 144;
        case 5: return 336;
        default: return 48;
    }
}

/// Throws Errc::insufficient_history if target_step < 336 or out of range.
[[nodiscard]] double persistence_predict(const PluginSeries& series, std::size_t target_step);

/// Same rule read from a feature row's stored lags; the row's spec must
/// contain lags 48, 144 and 336.
[[nodiscard]] double persistence_predict(const FeatureSpec& spec, const FeatureRow& row);

}  // namespace plugcast
