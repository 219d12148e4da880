#pragma once

#include <array>
#include <cstdint>

namespace plugcast {

/// SplitMix64 step. Used to expand seeds and derive child seeds.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Derives an independent seed for a named consumer from a master seed.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt) noexcept;

/// xoshiro256** 1.0 (Blackman & Vigna), seeded through SplitMix64.
///
/// All sampling helpers below are implemented here instead of going through
/// <random> distributions, whose output is implementation-defined. Splits,
/// initial weights, dropout masks and synthetic data therefore reproduce on
/// any platform for the same seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept;

    std::uint64_t next_u64() noexcept;
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Uniform on (0, 1].
    double uniform_open_zero() noexcept;
    /// Unbiased integer in [0, bound) via Lemire's multiply-and-reject. bound > 0.
    std::uint64_t below(std::uint64_t bound) noexcept;
    /// Standard normal via the Marsaglia polar method.
    double normal() noexcept;
    double exponential(double rate) noexcept;
    bool bernoulli(double p) noexcept { return uniform() < p; }

private:
    std::array<std::uint64_t, 4> s_{};
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace plugcast
