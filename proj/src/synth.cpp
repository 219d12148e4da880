#include "plugcast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "plugcast/error.hpp"
#include "plugcast/rng.hpp"

namespace plugcast {

using nlohmann::json;
namespace chr = std::chrono;

void SynthConfig::validate() const {
    if (n_charge_points < 1) fail(Errc::config, "synth.n_charge_points must be at least 1");
    if (span_end <= span_start) fail(Errc::config, "synth span is empty");
    if (!(base_rate_per_hour >= 0.0)) fail(Errc::config, "synth.base_rate_per_hour must be non-negative");
    auto non_negative = [](const auto& arr, const char* name) {
        for (double v : arr)
            if (!(v >= 0.0) || !std::isfinite(v)) fail(Errc::config, std::string("synth.") + name + " must be >= 0");
    };
    non_negative(dow_intensity, "dow_intensity");
    non_negative(hour_profile, "hour_profile");
    non_negative(month_scale, "month_scale");
    if (!(mean_duration_minutes > 0.0)) fail(Errc::config, "synth.mean_duration_minutes must be positive");
    if (!(duration_dispersion > 0.0)) fail(Errc::config, "synth.duration_dispersion must be positive");
}

SynthConfig default_config() {
    SynthConfig c;
    c.span_start = chr::year{2017} / chr::January / 1;
    c.span_end = chr::year{2018} / chr::January / 1;
    c.n_charge_points = 120;
    c.base_rate_per_hour = 14.0;
    c.dow_intensity = {1.0, 1.0, 1.0, 1.0, 1.0, 0.5, 0.46};
    c.hour_profile = {0.05, 0.04, 0.03, 0.03, 0.04, 0.10, 0.35, 0.80, 1.00, 1.00, 0.95, 0.90,
                      0.95, 0.90, 0.85, 0.80, 0.75, 0.65, 0.45, 0.30, 0.20, 0.14, 0.10, 0.07};
    // July and August at 0.8 against an annual mean of exactly 1.
    c.month_scale = {1.02, 1.08, 0.96, 1.10, 1.04, 1.12, 0.80, 0.80, 1.14, 0.98, 1.06, 0.90};
    c.mean_duration_minutes = 240.0;
    c.duration_dispersion = 0.8;
    c.seed = kDefaultSynthSeed;
    return c;
}

std::vector<ChargingEvent> generate_events(const SynthConfig& config) {
    config.validate();
    std::vector<ChargingEvent> events;
    const double max_dow = *std::max_element(config.dow_intensity.begin(), config.dow_intensity.end());
    const double max_hour = *std::max_element(config.hour_profile.begin(), config.hour_profile.end());
    const double max_month = *std::max_element(config.month_scale.begin(), config.month_scale.end());
    const double peak_per_minute = config.base_rate_per_hour / 60.0 * max_dow * max_hour * max_month;
    if (!(peak_per_minute > 0.0)) return events;

    const double sigma = config.duration_dispersion;
    const double mu = std::log(config.mean_duration_minutes) - 0.5 * sigma * sigma;
    const Timestamp origin{config.span_start};
    const double total_minutes = static_cast<double>((config.span_end - config.span_start).count()) * kMinutesPerDay;

    Rng rng(config.seed);
    double t = 0.0;
    std::size_t index = 0;
    for (;;) {
        t += rng.exponential(peak_per_minute);
        if (t >= total_minutes) break;
        const Timestamp start = origin + chr::minutes{static_cast<std::int64_t>(std::floor(t))};
        const double rate = config.base_rate_per_hour / 60.0 *
                            config.dow_intensity[static_cast<std::size_t>(day_of_week(start))] *
                            config.hour_profile[static_cast<std::size_t>(hour_of(start))] *
                            config.month_scale[static_cast<std::size_t>(month_of(start) - 1)];
        if (rng.uniform() * peak_per_minute >= rate) continue;

        std::int64_t duration = 0;
        do {
            duration = std::max<std::int64_t>(1, std::llround(std::exp(mu + sigma * rng.normal())));
        } while (duration > kOneWeekMinutes);

        ChargingEvent ev;
        char id[24];
        std::snprintf(id, sizeof id, "S%08zu", index + 1);
        ev.event_id = id;
        const auto cp = index % static_cast<std::size_t>(config.n_charge_points);
        std::snprintf(id, sizeof id, "CP%04zu", cp + 1);
        ev.charge_point_id = id;
        ev.connector = static_cast<int>((index / static_cast<std::size_t>(config.n_charge_points)) % 2) + 1;
        ev.start = start;
        ev.end = start + chr::minutes{duration};
        ev.duration_minutes = duration;
        const double charging_hours = std::min<double>(static_cast<double>(duration), 240.0) / 60.0;
        ev.energy_kwh = std::round(7.0 * charging_hours * (0.4 + 0.6 * rng.uniform()) * 1000.0) / 1000.0;
        ev.organization = "Synthetic Council";
        events.push_back(std::move(ev));
        ++index;
    }
    return events;
}

json to_json(const SynthConfig& c) {
    return {{"n_charge_points", c.n_charge_points},
            {"span_start", format_date(c.span_start)},
            {"span_end", format_date(c.span_end)},
            {"base_rate_per_hour", c.base_rate_per_hour},
            {"dow_intensity", c.dow_intensity},
            {"hour_profile", c.hour_profile},
            {"month_scale", c.month_scale},
            {"mean_duration_minutes", c.mean_duration_minutes},
            {"duration_dispersion", c.duration_dispersion},
            {"seed", c.seed}};
}

SynthConfig synth_config_from_json(const json& doc) {
    SynthConfig c = default_config();
    try {
        auto read_date = [&](const char* key, Date& out) {
            if (!doc.contains(key)) return;
            if (!parse_date(doc.at(key).get<std::string>(), "YYYY-MM-DD", out))
                fail(Errc::config, std::string("synth.") + key + " must be a YYYY-MM-DD date");
        };
        c.n_charge_points = doc.value("n_charge_points", c.n_charge_points);
        read_date("span_start", c.span_start);
        read_date("span_end", c.span_end);
        c.base_rate_per_hour = doc.value("base_rate_per_hour", c.base_rate_per_hour);
        if (doc.contains("dow_intensity")) c.dow_intensity = doc.at("dow_intensity").get<std::array<double, 7>>();
        if (doc.contains("hour_profile")) c.hour_profile = doc.at("hour_profile").get<std::array<double, 24>>();
        if (doc.contains("month_scale")) c.month_scale = doc.at("month_scale").get<std::array<double, 12>>();
        c.mean_duration_minutes = doc.value("mean_duration_minutes", c.mean_duration_minutes);
        c.duration_dispersion = doc.value("duration_dispersion", c.duration_dispersion);
        c.seed = doc.value("seed", c.seed);
    } catch (const json::exception& e) {
        fail(Errc::config, std::string("invalid synth config: ") + e.what());
    }
    c.validate();
    return c;
}

}  // namespace plugcast
