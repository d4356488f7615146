#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace psc::util {

/// Stable 64-bit FNV-1a hash.
std::uint64_t fnv1a(std::string_view data) noexcept;

/// Per-task seed derived from a global seed and a task id; stable across platforms.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view task) noexcept;

/// Uniform integer in [0, bound) by rejection sampling, independent of the
/// standard library's distribution implementation.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// Uniform double in [0, 1) from the top 53 bits.
double uniform01(std::mt19937_64& rng);

/// Standard normal deviate (Box-Muller; platform-stable).
double standard_normal(std::mt19937_64& rng);

template <class T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t k = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(v[i - 1], v[k]);
    }
}

}  // namespace psc::util
