#pragma once

// Synthetic ground-truth fields and random sampling masks, so the full
// pipeline is testable without external measurement data.
//
// A synthetic map is L + S + E:
//   L  exactly rank-r low-rank part: sum of r separable components, each an
//      outer product of per-mode factor vectors (smoothed when
//      smoothness > 0, unit-normalized), scaled so the field has RMS
//      close to 10 dB;
//   S  smooth part: white noise box-filtered along every mode with
//      half-width round(smoothness), rescaled to RMS 2 dB. Omitted
//      entirely when smoothness == 0;
//   E  white noise with standard deviation noise_db. Omitted when
//      noise_db == 0.
//
// All randomness comes from one SplitMix64 stream seeded with spec.seed,
// consumed in the order: factor vectors (component-major, then mode-major),
// then S, then E. Entries are bounded by 10*sqrt(r*total) + 2*sqrt(total)
// + 8*noise_db in magnitude; typical values are a few tens of dB.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmtc/rng.hpp"
#include "rmtc/samples.hpp"
#include "rmtc/tensor.hpp"

namespace rmtc {

struct SyntheticSpec {
    std::vector<std::size_t> dims;
    int rank = 1;
    double smoothness = 0.0;  // moving-average half-width, in cells
    double noise_db = 0.0;    // std of additive shadowing noise
    std::uint64_t seed = 0;
};

namespace detail {

// Clamped moving average of half-width h (window truncated at the borders
// and renormalized by the actual count).
inline std::vector<double> box_filter(std::span<const double> v, long h) {
    if (h <= 0) return {v.begin(), v.end()};
    const long n = static_cast<long>(v.size());
    std::vector<double> out(v.size());
    for (long i = 0; i < n; ++i) {
        const long a = std::max<long>(0, i - h);
        const long b = std::min<long>(n - 1, i + h);
        double acc = 0.0;
        for (long j = a; j <= b; ++j) acc += v[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = acc / static_cast<double>(b - a + 1);
    }
    return out;
}

}  // namespace detail

inline DenseTensor synthetic_map(const SyntheticSpec& spec) {
    if (spec.dims.empty()) throw std::invalid_argument("synthetic_map: dims must be nonempty");
    if (spec.rank < 1) throw std::invalid_argument("synthetic_map: rank must be >= 1");
    if (spec.smoothness < 0.0)
        throw std::invalid_argument("synthetic_map: smoothness must be >= 0");
    if (spec.noise_db < 0.0) throw std::invalid_argument("synthetic_map: noise_db must be >= 0");

    std::size_t total = 1;
    for (std::size_t d : spec.dims) {
        if (d == 0) throw std::invalid_argument("synthetic_map: every extent must be >= 1");
        total *= d;
    }
    for (std::size_t d : spec.dims) {
        const std::size_t cap = std::min(d, total / d);
        if (static_cast<std::size_t>(spec.rank) > cap)
            throw std::invalid_argument("synthetic_map: rank " + std::to_string(spec.rank) +
                                        " exceeds the smallest unfolding dimension " +
                                        std::to_string(cap));
    }

    SplitMix64 rng(spec.seed);
    const long h = std::lround(spec.smoothness);
    const std::size_t order = spec.dims.size();
    DenseTensor out(spec.dims);

    // L: r separable components with unit-norm factors.
    const double comp_scale = 10.0 * std::sqrt(static_cast<double>(total)) /
                              std::sqrt(static_cast<double>(spec.rank));
    for (int q = 0; q < spec.rank; ++q) {
        std::vector<std::vector<double>> factors(order);
        for (std::size_t mode = 0; mode < order; ++mode) {
            std::vector<double> v(spec.dims[mode]);
            for (double& x : v) x = rng.next_normal();
            v = detail::box_filter(v, h);
            double nrm = 0.0;
            for (double x : v) nrm += x * x;
            nrm = std::sqrt(nrm);
            for (double& x : v) x /= nrm;
            factors[mode] = std::move(v);
        }
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::size_t rest = flat;
            double prod = comp_scale;
            for (std::size_t mode = 0; mode < order; ++mode) {
                prod *= factors[mode][rest % spec.dims[mode]];
                rest /= spec.dims[mode];
            }
            out[flat] += prod;
        }
    }

    // S: separably box-filtered noise at RMS 5.
    if (h > 0) {
        DenseTensor smooth(spec.dims);
        for (std::size_t flat = 0; flat < total; ++flat) smooth[flat] = rng.next_normal();
        std::vector<double> fiber;
        for (std::size_t mode = 0; mode < order; ++mode) {
            const auto s = detail::mode_split(spec.dims, static_cast<int>(mode));
            fiber.resize(s.n);
            for (std::size_t hi = 0; hi < s.high; ++hi)
                for (std::size_t lo = 0; lo < s.low; ++lo) {
                    const std::size_t base = hi * s.low * s.n + lo;
                    for (std::size_t r = 0; r < s.n; ++r) fiber[r] = smooth[base + r * s.low];
                    const auto filtered = detail::box_filter(fiber, h);
                    for (std::size_t r = 0; r < s.n; ++r) smooth[base + r * s.low] = filtered[r];
                }
        }
        const double target = 2.0 * std::sqrt(static_cast<double>(total));
        const double nrm = norm(smooth);
        if (nrm > 0.0)
            for (std::size_t flat = 0; flat < total; ++flat)
                out[flat] += smooth[flat] * (target / nrm);
    }

    // E: additive shadowing noise.
    if (spec.noise_db > 0.0)
        for (std::size_t flat = 0; flat < total; ++flat)
            out[flat] += spec.noise_db * rng.next_normal();

    return out;
}

// Uniform sample of round(fraction * total) distinct positions (partial
// Fisher-Yates over the flat index range), returned sorted. Rounding is
// half-up, so sweep fractions map to exact counts.
inline std::vector<std::size_t> random_mask(const std::vector<std::size_t>& dims,
                                            double fraction, std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction <= 1.0))
        throw std::invalid_argument("random_mask: fraction must be in [0, 1]");
    std::size_t total = 1;
    for (std::size_t d : dims) {
        if (d == 0) throw std::invalid_argument("random_mask: every extent must be >= 1");
        total *= d;
    }
    const auto count =
        static_cast<std::size_t>(std::floor(fraction * static_cast<double>(total) + 0.5));

    std::vector<std::size_t> pool(total);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(total - i));
        std::swap(pool[i], pool[j]);
    }
    std::vector<std::size_t> mask(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(mask.begin(), mask.end());
    return mask;
}

// A(truth) at the mask positions.
inline SampleSet make_samples(const DenseTensor& truth, std::span<const std::size_t> mask) {
    SampleSet s(truth.dims());
    for (std::size_t j : mask) {
        if (j >= truth.size())
            throw std::invalid_argument("make_samples: mask index out of range");
        s.add_flat(j, truth[j]);
    }
    return s;
}

}  // namespace rmtc
