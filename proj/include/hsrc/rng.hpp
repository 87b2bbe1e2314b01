/*
Copyright 2026 The HSRC Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>

namespace hsrc {

/// Seeded random stream owned by a single simulation run.
///
/// std::mt19937_64 is fully specified by the standard, but the std
/// distributions are not, so bounded and real draws are derived here to keep
/// runs bit-reproducible across standard library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::size_t below(std::size_t bound) {
        const std::uint64_t b = bound;
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % b);
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return static_cast<std::size_t>(x % b);
    }

    /// Uniform real in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double q) { return uniform01() < q; }

    template <typename It>
    void shuffle(It first, It last) {
        const auto count = static_cast<std::size_t>(last - first);
        for (std::size_t i = count; i > 1; --i) {
            std::swap(first[i - 1], first[below(i)]);
        }
    }

  private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; derives independent stream seeds from (seed, a, b).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    auto step = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return step(step(step(seed) ^ a) ^ b);
}

} // namespace hsrc
