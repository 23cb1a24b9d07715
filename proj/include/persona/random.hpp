#ifndef PERSONA_RANDOM_HPP
#define PERSONA_RANDOM_HPP

#include <cstdint>
#include <random>

namespace persona {

/// The engine used for every seeded path. std::mt19937_64 has a fully
/// specified output sequence; the standard distributions do not, so the
/// helpers below replace them to keep results identical across platforms.
using Rng = std::mt19937_64;

/// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
    if (bound <= 1) {
        return 0;
    }
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return draw % bound;
}

/// Uniform real in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace persona

#endif
