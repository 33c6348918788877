/*
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

namespace fastdata {

// The engine is fully specified by the standard, unlike the std::
// distributions, so the draws below are identical on every platform.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    assert(n > 0);
    const auto range = static_cast<std::uint64_t>(n);
    const std::uint64_t threshold = (0 - range) % range;
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= threshold)
            return static_cast<std::size_t>(r % range);
    }
}

/// Standard normal deviate via Box-Muller; consumes exactly two draws.
inline double standard_normal(Rng& rng) {
    constexpr double two_pi = 6.283185307179586;
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    return r * std::cos(two_pi * u2);
}

// Independent sub-streams for the consumers of one experiment seed.
enum class SeedSalt : std::uint64_t {
    controller = 1,
    random_strategy = 2,
    metric_subsample = 3,
};

/// splitmix64 finalizer over seed + salt * golden ratio.
inline std::uint64_t derive_seed(std::uint64_t seed, SeedSalt salt) {
    std::uint64_t z = seed + static_cast<std::uint64_t>(salt) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace fastdata
