#pragma once

#include <cmath>
#include <cstdint>

namespace poclab {

// Counter-based deterministic randomness. Draw k of stream s is a pure
// function of (seed, s, k), so any parallel fill order produces identical
// values.
struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

namespace detail {
inline std::uint64_t sm_mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
}  // namespace detail

inline std::uint64_t rng_u64(const RngSpec& r, std::uint64_t counter) {
    using detail::sm_mix;
    std::uint64_t h = sm_mix(r.seed);
    h = sm_mix(h ^ sm_mix(r.stream_id ^ 0xD2B74407B1CE6E93ULL));
    h = sm_mix(h ^ sm_mix(counter ^ 0xCA5A826395121157ULL));
    return h;
}

// Uniform in (0, 1]; never returns 0 so logs are safe.
inline double rng_u01(const RngSpec& r, std::uint64_t counter) {
    return (double)((rng_u64(r, counter) >> 11) + 1) * 0x1.0p-53;
}

// Standard normal draw k, consuming counters {2k, 2k+1} (Box-Muller cosine
// branch only, keeping draws order-independent).
inline double rng_normal(const RngSpec& r, std::uint64_t k) {
    const double u1 = rng_u01(r, 2 * k);
    const double u2 = rng_u01(r, 2 * k + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// Independent child stream, e.g. one per particle or per sweep cell.
inline RngSpec rng_substream(const RngSpec& r, std::uint64_t child) {
    return RngSpec{r.seed, detail::sm_mix(r.stream_id ^ detail::sm_mix(child + 1))};
}

// Fixed stream ids for the logical purposes used across the codebase.
namespace streams {
inline constexpr std::uint64_t kInit = 0x11;
inline constexpr std::uint64_t kData = 0x22;
inline constexpr std::uint64_t kSweep = 0x33;
}  // namespace streams

}  // namespace poclab
