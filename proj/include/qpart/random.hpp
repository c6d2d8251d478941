// Copyright 2026 The qpart Authors.
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

// Philox4x32-10 counter-based generator (Salmon et al., Random123).
//
// Every output block is a pure function of (key, counter), so a sample
// stream can be split into chunks addressed by (seed, chunk_index) and
// generated in any order or on any number of threads with identical results.

#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace qpart {

struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  static constexpr int kRounds = 10;

  static constexpr Counter block(Counter ctr, Key key) {
    for (int round = 0; round < kRounds; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

// Sequential UniformRandomBitGenerator view over a Philox stream.
// The stream is identified by (seed, stream); words are drawn from
// successive counters (index_lo, stream_lo, stream_hi, index_hi).
class CounterRng {
 public:
  using result_type = std::uint32_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (pos_ == 4) {
      buffer_ = Philox4x32::block(
          {static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(stream_),
           static_cast<std::uint32_t>(stream_ >> 32), static_cast<std::uint32_t>(index_ >> 32)},
          key_);
      ++index_;
      pos_ = 0;
    }
    return buffer_[pos_++];
  }

  // Uniform integer in [0, n), n >= 1, by rejection (no modulo bias).
  std::uint32_t below(std::uint32_t n) {
    const std::uint32_t limit = max() - (max() % n + 1) % n;
    std::uint32_t x;
    do {
      x = (*this)();
    } while (x > limit);
    return x % n;
  }

  // Uniform integer in [lo, hi].
  int between(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<std::uint32_t>(hi - lo + 1)));
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    const std::uint64_t hi = (*this)() >> 5;
    const std::uint64_t lo = (*this)() >> 6;
    return static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t index_ = 0;
  Philox4x32::Counter buffer_{};
  int pos_ = 4;
};

}  // namespace qpart
