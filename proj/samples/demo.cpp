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

// Walks the threshold family: level, closeness to the next class, cost
// shares, and a posted-price sale between two buyers.

#include <iostream>

#include "qpart/qpart.hpp"

int main() {
  using namespace qpart;
  const int m = 5;
  for (int q = 2; q <= m; ++q) {
    const auto v = gen_threshold(m, frac(q, q - 1));
    std::cout << "threshold(" << m << ", " << q << "/" << q - 1 << "): level " << partition_level(v);
    if (q < m) std::cout << ", closeness to Q(" << q + 1 << ") " << closeness(v, q + 1).gamma;
    std::cout << "\n";
  }

  const auto c = gen_binomial_floor(6, 2);
  const auto pairs = make_partition({0b000011, 0b001100, 0b110000});
  const auto shares = citycore_prices(c, pairs);
  std::cout << "binomial_floor(6,2), pairs: price LP " << shares.lp_value << " vs cost " << c(pairs.subset)
            << (shares.feasible ? " (feasible)\n" : " (infeasible)\n");
  const auto greedy = greedy_prices(c, pairs);
  std::cout << "  greedy shares total " << greedy.total << "\n";

  const std::vector<Valuation> buyers{gen_xos(2, {{3, 3}}), gen_xos(2, {{5, 0}, {0, 5}})};
  const std::vector<Rational> prices{1, 1};
  MarketInstance inst{buyers, prices, {1, 0}};
  const auto out = simulate_mechanism(inst);
  const auto worst = worst_order_welfare(buyers, prices);
  std::cout << "market: welfare " << out.welfare << " (revenue " << out.revenue << "), worst order "
            << worst.welfare << ", optimum " << brute_opt_welfare(buyers).value << "\n";
  return 0;
}
