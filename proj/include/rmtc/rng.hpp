#pragma once

// SplitMix64 pseudo-random generator (Steele/Lea/Vigna, the public-domain
// reference sequence). Every step is exact 64-bit integer arithmetic, so a
// seeded stream is identical on every platform; the raw stream and the
// derived uniforms are pinned by recorded-value tests.
//
// Derivations from the raw stream, in the order they consume words:
//   next_double      u = (word >> 11) * 2^-53            in [0, 1)
//   next_double_pos  u = ((word >> 11) + 1) * 2^-53      in (0, 1]
//   next_below(n)    (word * n) >> 64 via 128-bit product (multiply-shift)
//   next_normal      Box-Muller from one (0,1] and one [0,1) uniform;
//                    consumes exactly two words per call
//
// Integer-derived quantities (masks, splits, shuffles) are bitwise portable.
// Normals additionally go through libm log/cos, so they are bitwise stable
// on one platform and reproducible up to last-ulp libm differences across
// platforms.

#include <cstdint>
#include <cmath>
#include <numbers>

namespace rmtc {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53 significant bits.
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in (0, 1]; safe as a log() argument.
    double next_double_pos() noexcept {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Uniform integer in [0, n), n >= 1.
    std::uint64_t next_below(std::uint64_t n) noexcept {
        __extension__ typedef unsigned __int128 u128;
        return static_cast<std::uint64_t>((static_cast<u128>(next_u64()) * n) >> 64);
    }

    // Standard normal via Box-Muller.
    double next_normal() noexcept {
        const double u1 = next_double_pos();
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t state_;
};

}  // namespace rmtc
