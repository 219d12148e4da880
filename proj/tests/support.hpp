#pragma once

#include <unistd.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "plugcast/error.hpp"
#include "plugcast/features.hpp"
#include "plugcast/ingest.hpp"
#include "plugcast/rng.hpp"
#include "plugcast/series.hpp"
#include "plugcast/time.hpp"

namespace plugcast::test {

// The Errc thrown by f, or nullopt if it returns normally.
template <typename F>
std::optional<Errc> errc_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

#define CHECK_ERRC(expr, code) \
    CHECK(::plugcast::test::errc_of([&] { (void)(expr); }) == std::optional<::plugcast::Errc>(code))

inline ChargingEvent make_event(std::string id, Timestamp start, Timestamp end) {
    ChargingEvent e;
    e.event_id = std::move(id);
    e.charge_point_id = "cp";
    e.start = start;
    e.end = end;
    e.duration_minutes = (end - start).count();
    return e;
}

inline PluginSeries make_series(Timestamp start, std::vector<std::int64_t> values) {
    PluginSeries s;
    s.start = start;
    s.resolution = Resolution::half_hour;
    s.mask.assign(values.size(), 0);
    s.values = std::move(values);
    return s;
}

// Counts, for every minute of the window, the events whose [start, end)
// contains it, by scanning all events, then takes the minimum of each
// 30-minute block.
inline std::vector<std::int64_t> brute_force_halfhour_min(const std::vector<ChargingEvent>& events,
                                                          TimeWindow window) {
    std::vector<std::int64_t> out;
    for (Timestamp block = window.begin; block < window.end; block += std::chrono::minutes{30}) {
        std::int64_t lowest = std::numeric_limits<std::int64_t>::max();
        for (int k = 0; k < 30; ++k) {
            const Timestamp m = block + std::chrono::minutes{k};
            std::int64_t count = 0;
            for (const auto& e : events)
                if (e.start <= m && m < e.end) ++count;
            lowest = std::min(lowest, count);
        }
        out.push_back(lowest);
    }
    return out;
}

// Up to 20 events over a window of up to 3 days; events may start before or
// end after the window.
inline std::vector<ChargingEvent> random_micro_events(Rng& rng, TimeWindow window) {
    const auto span = window.minutes();
    const auto n = static_cast<int>(rng.below(21));
    std::vector<ChargingEvent> events;
    for (int i = 0; i < n; ++i) {
        const auto offset = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(span + 240))) - 120;
        const auto length = static_cast<std::int64_t>(rng.below(rng.bernoulli(0.3) ? 3000 : 180));
        const Timestamp s = window.begin + std::chrono::minutes{offset};
        events.push_back(make_event("e" + std::to_string(i), s, s + std::chrono::minutes{length}));
    }
    return events;
}

class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("plugcast_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const { return path_; }
    [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::vector<double> random_vector(Rng& rng, std::size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = scale * rng.normal();
    return v;
}

using DayLaw = std::array<std::array<double, 3>, 7>;

// Feature rows for lags {48, 144, 336} with lag values uniform on [0, 2),
// days cycling Monday..Sunday, and target = law[dow] . lags + N(0, sigma^2).
// Every row is labelled train.
inline FeatureMatrix linear_law_matrix(std::uint64_t seed, std::size_t n, const DayLaw& law, double sigma) {
    Rng rng(seed);
    FeatureMatrix m;
    m.spec.lags = {48, 144, 336};
    const Timestamp monday = make_timestamp(2017, 1, 2);
    for (std::size_t i = 0; i < n; ++i) {
        FeatureRow r;
        r.dow = static_cast<int>(i % 7);
        r.timestamp = monday + std::chrono::days{r.dow} + std::chrono::minutes{30 * static_cast<int>(rng.below(48))};
        r.month = 1;
        r.hour = hour_of(r.timestamp);
        r.step = i;
        r.lag_values = {2.0 * rng.uniform(), 2.0 * rng.uniform(), 2.0 * rng.uniform()};
        const auto& c = law[static_cast<std::size_t>(r.dow)];
        r.target = c[0] * r.lag_values[0] + c[1] * r.lag_values[1] + c[2] * r.lag_values[2] + sigma * rng.normal();
        m.rows.push_back(std::move(r));
    }
    m.split.assign(n, Split::train);
    return m;
}

inline DayLaw uniform_law(double a, double b, double c) {
    DayLaw law;
    law.fill({a, b, c});
    return law;
}

// Generators mirrored in tests/reference/compute_reference.py.
inline std::vector<double> white_noise(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    return random_vector(rng, n);
}

inline std::vector<double> random_walk(std::uint64_t seed, std::size_t n) {
    auto v = white_noise(seed, n);
    for (std::size_t i = 1; i < n; ++i) v[i] += v[i - 1];
    return v;
}

inline std::vector<double> ar1(std::uint64_t seed, std::size_t n, double phi) {
    Rng rng(seed);
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) y[i] = phi * y[i - 1] + rng.normal();
    return y;
}

inline std::vector<double> ar2(std::uint64_t seed, std::size_t n, double phi1, double phi2) {
    Rng rng(seed);
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 2; i < n; ++i) y[i] = phi1 * y[i - 1] + phi2 * y[i - 2] + rng.normal();
    return y;
}

}  // namespace plugcast::test
