#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace opdyn::rng {

// Counter-based, stateless RNG. Every draw is a pure function of a seed and a
// handful of stream indices (agent, step, axis, ...), so parallel execution
// cannot reorder draws and ensembles are reproducible from the seed alone.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::initializer_list<std::uint64_t> words) {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (std::uint64_t w : words)
        h = splitmix64(h ^ splitmix64(w + 0x9e3779b97f4a7c15ULL));
    return h;
}

// Domain separators keep independent uses of the same seed uncorrelated.
enum : std::uint64_t {
    kTagInit = 1,
    kTagStep = 2,
    kTagSliced = 3,
    kTagSample = 4,
    kTagMixture = 5,
};

inline double to_unit(std::uint64_t u) {
    return static_cast<double>(u >> 11) * 0x1.0p-53;  // [0, 1)
}

inline double uniform01(std::uint64_t seed, std::uint64_t tag, std::uint64_t a,
                        std::uint64_t b, std::uint64_t c) {
    return to_unit(mix({seed, tag, a, b, c}));
}

// One standard normal per counter via Box-Muller (cosine branch).
inline double normal(std::uint64_t seed, std::uint64_t tag, std::uint64_t a,
                     std::uint64_t b, std::uint64_t c) {
    const double u1 = to_unit(mix({seed, tag, a, b, c, 0}));
    const double u2 = to_unit(mix({seed, tag, a, b, c, 1}));
    return std::sqrt(-2.0 * std::log1p(-u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

// Sequential stream for uses without a natural counter (initial sampling,
// projection directions). Still a pure function of its key.
struct Stream {
    std::uint64_t key;
    std::uint64_t ctr = 0;

    std::uint64_t next() { return mix({key, ctr++}); }
    double u01() { return to_unit(next()); }
    double normal() {
        const double u1 = u01();
        const double u2 = u01();
        return std::sqrt(-2.0 * std::log1p(-u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }
};

inline Stream make_stream(std::uint64_t seed, std::uint64_t tag,
                          std::uint64_t id = 0) {
    return Stream{mix({seed, tag, id})};
}

}  // namespace opdyn::rng
