// Copyright 2026 The ruinlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <limits>

namespace ruinlab {

/// SplitMix64 finalizer. Used to derive stream seeds and to expand them into
/// engine state.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}
  constexpr std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64_mix(state_);
  }

 private:
  std::uint64_t state_;
};

/// xoshiro256** engine. Satisfies UniformRandomBitGenerator so it plugs into
/// the <random> distributions.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Xoshiro256(std::uint64_t seed) noexcept : s_{} {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in the open interval (0, 1).
  constexpr double uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

/// Purpose tags keep the streams of different estimators disjoint even when
/// they share a master seed and replicate index.
enum class StreamTag : std::uint64_t {
  kPerpetuity = 1,
  kPerpetuityShifted = 2,
  kRuinPaths = 3,
  kNonNull = 4,
  kGoldie = 5,
  kPairs = 6,
  kTest = 99,
};

/// Seed of replicate `index` under `tag`. Each replicate owns one engine, so
/// results never depend on how replicates are scheduled across workers.
constexpr std::uint64_t stream_seed(std::uint64_t master, StreamTag tag,
                                    std::uint64_t index) noexcept {
  std::uint64_t h = splitmix64_mix(master + 0x9e3779b97f4a7c15ULL);
  h = splitmix64_mix(h ^ (static_cast<std::uint64_t>(tag) * 0xd1b54a32d192ed03ULL));
  return splitmix64_mix(h ^ (index * 0xa0761d6478bd642fULL + 0xe7037ed1a0b428dbULL));
}

inline Xoshiro256 make_stream(std::uint64_t master, StreamTag tag,
                              std::uint64_t index) noexcept {
  return Xoshiro256(stream_seed(master, tag, index));
}

}  // namespace ruinlab
