#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "plugcast/ingest.hpp"
#include "plugcast/time.hpp"

namespace plugcast {

struct SynthConfig {
    int n_charge_points = 120;
    Date span_start{};
    Date span_end{};  // exclusive
    // Expected arrivals per hour when every multiplier below is 1.
    double base_rate_per_hour = 12.0;
    std::array<double, 7> dow_intensity{};    // Monday first
    std::array<double, 24> hour_profile{};
    std::array<double, 12> month_scale{};     // January first
    double mean_duration_minutes = 240.0;
    double duration_dispersion = 0.8;  // sigma of log-duration
    std::uint64_t seed = 0;

    /// Throws Errc::config on negative intensities, an empty span or
    /// non-positive duration parameters.
    void validate() const;
};

inline constexpr std::uint64_t kDefaultSynthSeed = 1;

// Calendar year 2017 with weekday arrival rates twice the weekend rate, a
// daytime arrival peak and July/August running 20% below the annual mean.
[[nodiscard]] SynthConfig default_config();

// Arrivals follow an inhomogeneous Poisson process with rate
//   base * dow_intensity[dow] * hour_profile[hour] * month_scale[month]
// simulated by thinning a homogeneous process. Durations are log-normal with
// the configured mean, redrawn until they are at most seven days, and
// rounded to whole minutes (at least one). Charge points are assigned round
// robin.
[[nodiscard]] std::vector<ChargingEvent> generate_events(const SynthConfig& config);

[[nodiscard]] nlohmann::json to_json(const SynthConfig& config);
/// Missing keys fall back to default_config().
[[nodiscard]] SynthConfig synth_config_from_json(const nlohmann::json& doc);

}  // namespace plugcast
