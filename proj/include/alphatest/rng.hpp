#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace alphatest {

using Rng = std::mt19937_64;

/// Independent generator for the (seed, a, b) coordinate. Every random
/// quantity in the library is drawn from a stream derived this way so that
/// results do not depend on execution order or thread count.
[[nodiscard]] inline Rng derive_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(a),    static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b),    static_cast<std::uint32_t>(b >> 32)};
    return Rng(seq);
}

/// 64-bit FNV-1a, used to key streams by stable names.
[[nodiscard]] constexpr std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (char c : text) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

}  // namespace alphatest
