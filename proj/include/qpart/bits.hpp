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

// Subset-as-bitmask helpers. Bit i of a mask stands for item i+1.

#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace qpart {

using Mask = std::uint32_t;

inline constexpr Mask full_mask(int m) {
  return m >= 32 ? ~Mask{0} : (Mask{1} << m) - 1;
}

inline int popcount(Mask s) { return std::popcount(s); }

inline bool is_subset(Mask s, Mask t) { return (s & ~t) == 0; }

inline int lowest_item(Mask s) { return std::countr_zero(s); }

// Items of s (0-based), ascending.
inline std::vector<int> items_of(Mask s) {
  std::vector<int> out;
  out.reserve(popcount(s));
  for (Mask r = s; r != 0; r &= r - 1) out.push_back(std::countr_zero(r));
  return out;
}

// Calls f(t) for every submask t of s, including 0 and s, in decreasing order.
template <class F>
void for_each_submask(Mask s, F&& f) {
  for (Mask t = s;; t = (t - 1) & s) {
    f(t);
    if (t == 0) break;
  }
}

// "{1,3,4}" style rendering with 1-based items.
inline std::string mask_to_string(Mask s) {
  std::string out = "{";
  bool first = true;
  for (int i : items_of(s)) {
    if (!first) out += ",";
    out += std::to_string(i + 1);
    first = false;
  }
  return out + "}";
}

}  // namespace qpart
