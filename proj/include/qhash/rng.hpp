// Copyright 2026 The qhash Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string_view>

namespace qhash {

/// Identifier written into every output that depends on random draws.
inline constexpr std::string_view kRngAlgorithm = "splitmix64-counter";

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based stream: the j-th draw of stream (seed, stream_id) is a pure
/// function of the three integers, so shot i can be generated independently
/// of every other shot.
class CounterRng {
public:
    constexpr CounterRng(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : key_(splitmix64_mix(splitmix64_mix(seed) ^ (stream_id * 0xd6e8feb86659fd93ULL))) {}

    constexpr std::uint64_t next_u64() noexcept {
        return splitmix64_mix(key_ + 0x9e3779b97f4a7c15ULL * (counter_++));
    }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double next_unit() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    constexpr double next_uniform(double lo, double hi) noexcept {
        return lo + (hi - lo) * next_unit();
    }

    /// Uniform integer in [0, n), n > 0. Multiply-shift reduction; bias at most n / 2^64.
    constexpr std::uint64_t next_below(std::uint64_t n) noexcept {
        __extension__ using u128 = unsigned __int128;
        return static_cast<std::uint64_t>((static_cast<u128>(next_u64()) * n) >> 64);
    }

    constexpr std::uint64_t position() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Derive a child seed, e.g. one per grid point or per replica.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
    return splitmix64_mix(seed ^ splitmix64_mix(salt + 0x632be59bd9b4e019ULL));
}

}  // namespace qhash
