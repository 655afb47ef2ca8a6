// Copyright 2026 The kac Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kac/miner.hpp"

#include <random>
#include <set>

#include "gtest/gtest.h"
#include "json.hpp"
#include "kac/privacy.hpp"
#include "test_support.hpp"

namespace kac {
namespace {

using ::kac::testing::mask_set;
using ::kac::testing::naive_support;
using ::kac::testing::random_dataset;
using ::kac::testing::toy;

std::vector<FeatureSet> items_of(const MaximalCollection& c) {
  std::vector<FeatureSet> out;
  for (const auto& m : c.sets) out.push_back(m.items);
  return out;
}

TEST(MinerTest, ToyMaximalSets) {
  const MaximalCollection c = mine_maximal(toy(), 2);
  EXPECT_EQ(items_of(c), (std::vector<FeatureSet>{{0, 1, 4}, {0, 2, 4}, {0, 3, 4}}));
  EXPECT_EQ(c.sets[0].support, 2u);
  EXPECT_EQ(c.sets[1].support, 4u);
  EXPECT_EQ(c.sets[2].support, 2u);
  EXPECT_EQ(c.min_support, 2u);
  EXPECT_FALSE(c.truncated);
  EXPECT_EQ(items_of(brute_force_maximal(toy(), 2)), items_of(c));
}

TEST(MinerTest, ToyFeasibleDownset) {
  const auto frequent = brute_force_frequent(toy(), 2);
  const std::set<FeatureSet> got(frequent.begin(), frequent.end());
  const std::set<FeatureSet> expected{
      {0},    {1},    {2},       {3},       {4},       {0, 1},    {0, 2},    {0, 3},
      {0, 4}, {1, 4}, {2, 4},    {3, 4},    {0, 1, 4}, {0, 2, 4}, {0, 3, 4}};
  EXPECT_EQ(got, expected);
  EXPECT_EQ(frequent.size(), 15u);
}

TEST(MinerTest, KOneGivesMaximalContainmentSets) {
  // Distinct containment sets are 10101, 10011, 11101, 11011; the first two
  // sit inside the last two.
  EXPECT_EQ(items_of(mine_maximal(toy(), 1)),
            (std::vector<FeatureSet>{{0, 1, 2, 4}, {0, 1, 3, 4}}));
}

TEST(MinerTest, EdgeCases) {
  const BinaryDataset t = toy();
  EXPECT_TRUE(mine_maximal(t, 7).sets.empty());
  EXPECT_TRUE(brute_force_maximal(t, 7).sets.empty());
  // x1 and x5 are set in every row.
  EXPECT_EQ(items_of(mine_maximal(t, 6)), (std::vector<FeatureSet>{{0, 4}}));
  const BinaryDataset zeros = ::kac::testing::make_dataset({"00", "00"}, "+-");
  EXPECT_EQ(items_of(mine_maximal(zeros, 1)), (std::vector<FeatureSet>{FeatureSet{}}));
  EXPECT_THROW(mine_maximal(t, 0), std::invalid_argument);
}

TEST(MinerTest, Support) {
  const BinaryDataset t = toy();
  EXPECT_EQ(support(t, FeatureSet{0, 2, 4}), 4u);
  EXPECT_EQ(support(t, FeatureSet{1, 2}), 1u);
  EXPECT_EQ(support(t, FeatureSet{}), 6u);
}

TEST(MinerTest, TruncationKeepsLargestSets) {
  MineOptions opts;
  opts.max_results = 2;
  const MaximalCollection c = mine_maximal(toy(), 2, opts);
  EXPECT_TRUE(c.truncated);
  EXPECT_EQ(c.sets.size(), 2u);
}

TEST(MinerTest, TextAndJsonOutput) {
  const BinaryDataset t = toy();
  const MaximalCollection c = mine_maximal(t, 2);
  EXPECT_EQ(collection_to_text(t, c), "2\tx1,x2,x5\n4\tx1,x3,x5\n2\tx1,x4,x5\n");
  const auto j = nlohmann::json::parse(collection_to_json(t, c));
  EXPECT_EQ(j["min_support"], 2);
}

TEST(MinerPropertyTest, MatchesBruteForce) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const double density = 0.3 + 0.5 * static_cast<double>(rng() % 100) / 100.0;
    const BinaryDataset d = random_dataset(rng, 1 + rng() % 50, 1 + rng() % 12, density);
    const std::size_t k = 1 + rng() % 5;
    const MaximalCollection fast = mine_maximal(d, k);
    const MaximalCollection slow = brute_force_maximal(d, k);
    ASSERT_EQ(fast.sets, slow.sets) << "trial " << trial;
    MineOptions threaded;
    threaded.threads = 4;
    ASSERT_EQ(mine_maximal(d, k, threaded).sets, fast.sets);
  }
}

TEST(MinerPropertyTest, MaximalSetsAreFeasibleAndMaximal) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    const BinaryDataset d = random_dataset(rng, 2 + rng() % 30, 1 + rng() % 10, 0.6);
    const std::size_t k = 1 + rng() % 4;
    for (const auto& m : mine_maximal(d, k).sets) {
      EXPECT_EQ(m.support, naive_support(d, m.items));
      EXPECT_GE(m.support, k);
      EXPECT_TRUE(satisfies_k_ac(d, m.items, k));
      for (FeatureIndex x = 0; x < d.d(); ++x) {
        if (!m.items.contains(x)) { EXPECT_LT(support(d, m.items.with(x)), k); }
      }
    }
    // Anti-monotone support on a random chain.
    const std::uint32_t big = static_cast<std::uint32_t>(rng()) & ((1U << d.d()) - 1);
    const std::uint32_t small = big & static_cast<std::uint32_t>(rng());
    EXPECT_GE(support(d, mask_set(small, d.d())), support(d, mask_set(big, d.d())));
  }
}

}  // namespace
}  // namespace kac
