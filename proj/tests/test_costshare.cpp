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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qpart/costshare.hpp"

namespace qpart {
namespace {

Mask set_of(std::initializer_list<int> items) {
  Mask s = 0;
  for (int i : items) s |= Mask{1} << (i - 1);
  return s;
}

TEST(CitycoreTest, AdditiveCostsChargeEachCityItsCost) {
  const auto c = oracle::additive({1, 2, frac(1, 2), 3, frac(5, 4)});
  const auto part = make_partition({set_of({1, 3}), set_of({2}), set_of({4, 5})});
  const auto res = citycore_prices(c, part);
  ASSERT_TRUE(res.feasible);
  EXPECT_EQ(res.total, c(part.subset));
  for (int j = 0; j < part.k(); ++j) EXPECT_EQ(res.prices[j], c(part.blocks[j]));
}

TEST(CitycoreTest, BinomialFloorPairsAreInfeasible) {
  const auto c = gen_binomial_floor(6, 2);
  const auto part = make_partition({set_of({1, 2}), set_of({3, 4}), set_of({5, 6})});
  const auto res = citycore_prices(c, part);
  EXPECT_FALSE(res.feasible);
  EXPECT_EQ(res.lp_value, frac(45, 4));
  EXPECT_EQ(res.deficit, 15 - frac(45, 4));
}

TEST(CitycoreTest, FeasibleEverywhereIffPartitioning) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto c = seed % 2 ? gen_random_subadditive(5, seed) : oracle::random_supermodular(5, seed);
    for (int q = 2; q <= 4; ++q) {
      bool all_feasible = true;
      for (Mask s = 1; s < 32; ++s) {
        if (popcount(s) < 2) continue;
        for_each_partition(s, 2, q, [&](const Partition& part) {
          const auto res = citycore_prices(c, part);
          if (res.feasible) {
            EXPECT_EQ(res.total, c(s));
            EXPECT_TRUE(coalition_constraints_hold(c, part, res.prices));
          }
          all_feasible = all_feasible && res.feasible;
          return true;
        });
      }
      EXPECT_EQ(all_feasible, is_q_partitioning(c, q).holds) << seed << " " << q;
    }
  }
}

TEST(GammaCitycoreTest, ClosenessIsFeasibleEverywhere) {
  const auto c = gen_threshold(5, 2);
  const Rational gamma = closeness(c, 3).gamma;
  ASSERT_LT(gamma, 1);
  bool all_feasible = true;
  bool strict_fails = false;
  for_each_partition(full_mask(5), 2, 3, [&](const Partition& part) {
    const auto res = gamma_citycore_prices(c, part, gamma);
    all_feasible = all_feasible && res.feasible;
    EXPECT_TRUE(coalition_constraints_hold(c, part, res.prices));
    EXPECT_GE(res.total, gamma * c(part.subset));
    EXPECT_LE(res.total, c(part.subset));
    strict_fails = strict_fails || !gamma_citycore_prices(c, part, 1).feasible;
    return true;
  });
  EXPECT_TRUE(all_feasible);
  EXPECT_TRUE(strict_fails);
  const auto witness = *closeness(c, 3).argmin;
  EXPECT_FALSE(gamma_citycore_prices(c, witness.partition, 1).feasible);
  EXPECT_TRUE(gamma_citycore_prices(c, witness.partition, frac(1, 1000000)).feasible);
  EXPECT_THROW(gamma_citycore_prices(c, witness.partition, 0), std::invalid_argument);
}

TEST(GreedyTest, TwoUnitCities) {
  const auto g = gen_threshold(2, 1);
  std::vector<GreedyStep> trace;
  const auto res = greedy_prices(g, make_partition({1, 2}), &trace);
  ASSERT_EQ(trace.size(), 1u);
  EXPECT_EQ(trace[0].chosen, 3u);
  EXPECT_EQ(trace[0].ratio, frac(1, 2));
  EXPECT_EQ(res.prices, (std::vector<Rational>{frac(1, 2), frac(1, 2)}));
  EXPECT_EQ(res.total, 1);
  EXPECT_TRUE(res.feasible);
}

// Hand trace for additive costs: every step picks the cheapest remaining
// singleton, so each city pays its cost divided by H_{q-1}.
TEST(GreedyTest, AdditiveCosts) {
  const auto g = oracle::additive({3, 1, 2});
  const auto part = make_partition({1, 2, 4});
  std::vector<GreedyStep> trace;
  const auto res = greedy_prices(g, part, &trace);
  ASSERT_EQ(trace.size(), 3u);
  EXPECT_EQ(trace[0].chosen, 2u);
  EXPECT_EQ(trace[1].chosen, 4u);
  EXPECT_EQ(trace[2].chosen, 1u);
  EXPECT_EQ(res.total, 6 / harmonic(2));
  const auto two = greedy_prices(oracle::additive({3, 1}), make_partition({1, 2}));
  EXPECT_EQ(two.total, 4);
}

TEST(GreedyTest, SetCoverSingletonCities) {
  const auto g = gen_setcover_f2(2);
  const auto res = greedy_prices(g, make_partition({1, 2, 4}));
  EXPECT_GE(res.total, frac(4, 3));
  EXPECT_TRUE(res.feasible);
}

TEST(GreedyTest, GuaranteeOnRandomInstances) {
  CounterRng rng(55);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = rng.between(3, 7);
    const auto g = gen_random_subadditive(m, 1000 + trial);
    const int q = rng.between(2, std::min(m, 5));
    std::vector<Mask> blocks(q, 0);
    for (int i = 0; i < m; ++i) blocks[i < q ? i : rng.between(0, q - 1)] |= Mask{1} << i;
    const auto part = make_partition(blocks);
    const auto res = greedy_prices(g, part);
    EXPECT_TRUE(coalition_constraints_hold(g, part, res.prices));
    EXPECT_GE(res.total, g(part.subset) / harmonic(q - 1));
    EXPECT_LE(res.total, g(part.subset));
  }
}

TEST(GreedyTest, RejectsNonSubadditive) {
  EXPECT_THROW(greedy_prices(oracle::random_supermodular(3, 1), make_partition({1, 6})),
               std::invalid_argument);
}

}  // namespace
}  // namespace qpart
