#pragma once

#include <cstdint>
#include <random>

namespace leadlag::detail {

// splitmix64 finalizer; mixes (root, stream) into a well-spread child seed.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) noexcept {
    std::uint64_t z = root + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

using Engine = std::mt19937_64;

[[nodiscard]] inline Engine make_engine(std::uint64_t root, std::uint64_t stream) {
    return Engine(derive_seed(root, stream));
}

}  // namespace leadlag::detail
