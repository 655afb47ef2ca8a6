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

#include "kac/selectors.hpp"

#include <cmath>
#include <map>
#include <random>

#include "gtest/gtest.h"
#include "json.hpp"
#include "kac/miner.hpp"
#include "kac/privacy.hpp"
#include "test_support.hpp"

namespace kac {
namespace {

using ::kac::testing::ac_not_kanon_dataset;
using ::kac::testing::make_dataset;
using ::kac::testing::mask_set;
using ::kac::testing::random_dataset;
using ::kac::testing::toy;

std::vector<FeatureIndex> trace_features(const SelectionResult& r) {
  std::vector<FeatureIndex> out;
  for (const auto& s : r.trace) out.push_back(s.feature);
  return out;
}

TEST(MethodTest, NamesRoundTrip) {
  for (auto m : {Method::kMaximal, Method::kGreedyHamDist, Method::kGreedyDistCnt,
                 Method::kKanonHamDist, Method::kKanonDistCnt, Method::kCmGreedy,
                 Method::kLaplaceDp, Method::kExponentialDp, Method::kFull}) {
    EXPECT_EQ(parse_method(method_name(m)), m);
  }
  EXPECT_THROW(parse_method("simulated-annealing"), std::invalid_argument);
  EXPECT_TRUE(is_dp_method(Method::kLaplaceDp));
  EXPECT_TRUE(is_kanon_method(Method::kKanonDistCnt));
  EXPECT_TRUE(is_ac_method(Method::kCmGreedy));
  EXPECT_FALSE(is_ac_method(Method::kFull));
}

TEST(MaximalTest, Toy) {
  const SelectionResult r = select_maximal(toy(), 2);
  EXPECT_EQ(r.features, (FeatureSet{0, 1, 4}));
  EXPECT_EQ(r.ham_dist, Rational(6, 9));
  EXPECT_GE(r.achieved_ac, 2u);

  MaximalOptions one;
  one.r = 1;
  EXPECT_EQ(select_maximal(toy(), 2, one).features, (FeatureSet{0, 1, 4}));

  const SelectionResult none = select_maximal(toy(), 7);
  EXPECT_TRUE(none.features.empty());
  EXPECT_FALSE(none.warnings.empty());
}

TEST(GreedyHamDistTest, Toy) {
  // Per-feature order is x2 (6/9), x3, x4 (4/9), x1, x5 (0).
  const SelectionResult k2 = select_greedy_hamdist(toy(), 2);
  EXPECT_EQ(k2.features, (FeatureSet{1}));
  EXPECT_EQ(k2.achieved_ac, 2u);

  const SelectionResult k6 = select_greedy_hamdist(toy(), 6);
  EXPECT_TRUE(k6.features.empty());
  EXPECT_FALSE(k6.warnings.empty());

  GreedyOptions skip;
  skip.continue_after_violation = true;
  const SelectionResult k6c = select_greedy_hamdist(toy(), 6, skip);
  EXPECT_EQ(k6c.features, (FeatureSet{0, 4}));
  EXPECT_EQ(k6c.achieved_ac, 6u);

  const SelectionResult k1 = select_greedy_hamdist(toy(), 1);
  EXPECT_EQ(k1.features, FeatureSet::all(5));
  EXPECT_EQ(trace_features(k1), (std::vector<FeatureIndex>{1, 2, 3, 0, 4}));
  EXPECT_THROW(select_greedy_hamdist(toy(), 0), std::invalid_argument);
}

TEST(GreedyDistCntTest, Toy) {
  const SelectionResult k1 = select_greedy_distcnt(toy(), 1);
  EXPECT_EQ(k1.dist_cnt, dist_cnt(toy(), FeatureSet::all(5)));
  const SelectionResult k2 = select_greedy_distcnt(toy(), 2);
  ASSERT_FALSE(k2.trace.empty());
  EXPECT_EQ(k2.trace[0].feature, 1u);
  EXPECT_EQ(k2.trace[0].exact_gain, Rational(6, 9));
  EXPECT_GE(k2.achieved_ac, 2u);
}

TEST(KanonGreedyTest, AcWithoutKanon) {
  const BinaryDataset l = ac_not_kanon_dataset();
  for (Metric m : {Metric::kHamDist, Metric::kDistCnt}) {
    const SelectionResult kanon = select_greedy_kanon(l, 2, m);
    EXPECT_LE(kanon.features.size(), 1u);
    EXPECT_TRUE(satisfies_k_anonymity(l, kanon.features, 2));
  }
  const SelectionResult r = select_greedy_kanon(toy(), 2, Metric::kHamDist);
  EXPECT_TRUE(satisfies_k_anonymity(toy(), r.features, 2));
}

TEST(CmGreedyTest, Examples) {
  const BinaryDataset sep = make_dataset({"10", "10", "10", "01", "01", "01"}, "+++---");
  EXPECT_EQ(select_cm_greedy(sep, 2).cm_penalty, 0u);
  EXPECT_EQ(cm_penalty(toy(), FeatureSet{}), 3u);
  EXPECT_GE(select_cm_greedy(toy(), 2).achieved_ac, 2u);
}

TEST(SelectTest, DispatchValidatesParameters) {
  SelectRequest req;
  req.method = Method::kGreedyHamDist;
  EXPECT_THROW(select(toy(), req), std::invalid_argument);
  req.k = 2;
  EXPECT_EQ(select(toy(), req).features, (FeatureSet{1}));
  req.method = Method::kLaplaceDp;
  EXPECT_THROW(select(toy(), req), std::invalid_argument);
  req.epsilon = 1.0;
  req.num_features = 6;
  EXPECT_THROW(select(toy(), req), std::invalid_argument);
  req.num_features = 2;
  EXPECT_EQ(select(toy(), req).features.size(), 2u);
  req.method = Method::kFull;
  EXPECT_EQ(select(toy(), req).features, FeatureSet::all(5));
}

TEST(DpTest, Sensitivity) { EXPECT_DOUBLE_EQ(hamdist_sensitivity(toy()), 1.0 / 3.0); }

TEST(DpTest, HugeEpsilonIsNoiselessTopN) {
  EXPECT_EQ(select_laplace_dp(toy(), 1e6, 1, 1).features, (FeatureSet{1}));
  // x3 and x4 tie at 4/9, so either may take the second slot.
  const FeatureSet two = select_laplace_dp(toy(), 1e6, 2, 1).features;
  EXPECT_TRUE(two == (FeatureSet{1, 2}) || two == (FeatureSet{1, 3}));
  EXPECT_EQ(select_laplace_dp(toy(), 1e6, 3, 1).features, (FeatureSet{1, 2, 3}));
  const SelectionResult e = select_exponential_dp(toy(), 1e6, 1, 5);
  EXPECT_EQ(e.features, (FeatureSet{1}));
}

TEST(DpTest, SeedDeterminism) {
  std::mt19937_64 rng(31);
  const BinaryDataset d = random_dataset(rng, 40, 10, 0.5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = select_laplace_dp(d, 0.5, 4, seed);
    const auto b = select_laplace_dp(d, 0.5, 4, seed);
    EXPECT_EQ(a.features, b.features);
    EXPECT_EQ(selection_to_json(d, a), selection_to_json(d, b));
    EXPECT_EQ(select_exponential_dp(d, 0.5, 4, seed).features,
              select_exponential_dp(d, 0.5, 4, seed).features);
    EXPECT_EQ(select_exponential_dp(d, 0.5, 4, seed).features.size(), 4u);
  }
  EXPECT_THROW(select_exponential_dp(d, 0.0, 2, 0), std::invalid_argument);
  EXPECT_THROW(select_exponential_dp(d, 1.0, 0, 0), std::invalid_argument);
}

TEST(DpTest, TinyEpsilonExponentialIsRoughlyUniform) {
  std::map<FeatureIndex, int> counts;
  for (std::uint64_t seed = 0; seed < 5000; ++seed) {
    counts[select_exponential_dp(toy(), 1e-9, 1, seed).features[0]]++;
  }
  ASSERT_EQ(counts.size(), 5u);
  for (auto [x, c] : counts) EXPECT_NEAR(c, 1000, 150) << "feature " << x;
}

TEST(NoiseTest, LaplaceMoments) {
  NoiseSource noise(99);
  double sum = 0.0;
  double abs_sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double v = noise.laplace(2.0);
    sum += v;
    abs_sum += std::abs(v);
  }
  EXPECT_NEAR(sum / n, 0.0, 0.05);
  EXPECT_NEAR(abs_sum / n, 2.0, 0.05);
  for (int i = 0; i < 1000; ++i) {
    const double u = noise.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

std::map<std::pair<std::vector<bool>, Label>, std::size_t> histogram(const BinaryDataset& d,
                                                                     const FeatureSet& s) {
  std::map<std::pair<std::vector<bool>, Label>, std::size_t> h;
  for (EntityIndex e = 0; e < d.n(); ++e) {
    h[{::kac::testing::projected(d, s, e), d.label(e)}]++;
  }
  return h;
}

TEST(ReleaseTest, HugeEpsilonReproducesHistogram) {
  const FeatureSet s{0, 1, 4};
  const ReleaseResult r = dp_release(toy(), s, 1e6, 3);
  ASSERT_TRUE(r.data.has_value());
  EXPECT_EQ(r.data->n(), 6u);
  EXPECT_EQ(histogram(*r.data, FeatureSet::all(3)), histogram(toy(), s));
  EXPECT_EQ(r.data->feature_names()[1], "x2");
}

TEST(ReleaseTest, NoisyCountsAreClampedAndSizeConcentrates) {
  std::mt19937_64 rng(37);
  const BinaryDataset d = random_dataset(rng, 500, 4, 0.5);
  const FeatureSet s = FeatureSet::all(4);
  // Small epsilon: many empty cells go negative before clamping; rows are still valid.
  const ReleaseResult noisy = dp_release(d, s, 0.05, 8);
  ASSERT_TRUE(noisy.data.has_value());
  for (auto [key, count] : histogram(*noisy.data, s)) EXPECT_GT(count, 0u);
  // Large epsilon: total count stays within 32 cells * a few noise scales.
  const ReleaseResult sharp = dp_release(d, s, 10.0, 8);
  ASSERT_TRUE(sharp.data.has_value());
  EXPECT_NEAR(static_cast<double>(sharp.data->n()), 500.0, 10.0);
}

TEST(ReleaseTest, Errors) {
  EXPECT_THROW(dp_release(toy(), FeatureSet{0}, 0.0, 1), std::invalid_argument);
  std::vector<std::string> rows(2, std::string(21, '1'));
  const BinaryDataset wide = make_dataset(rows, "+-");
  EXPECT_THROW(dp_release(wide, FeatureSet::all(21), 1.0, 1), std::invalid_argument);
  // An empty table at a tiny budget can round to nothing.
  bool saw_empty = false;
  for (std::uint64_t seed = 0; seed < 50 && !saw_empty; ++seed) {
    const ReleaseResult r = dp_release(make_dataset({"0", "1"}, "+-"), FeatureSet{}, 1e-3, seed);
    if (!r.data) {
      saw_empty = true;
      EXPECT_FALSE(r.warnings.empty());
    }
  }
  EXPECT_TRUE(saw_empty);
}

TEST(SerializationTest, JsonAndTrace) {
  const BinaryDataset t = toy();
  const SelectionResult r = select_greedy_hamdist(t, 2);
  const auto j = nlohmann::json::parse(selection_to_json(t, r));
  EXPECT_EQ(j["method"], "greedy-hamdist");
  EXPECT_EQ(selection_features_from_json(selection_to_json(t, r)), r.features);
  EXPECT_THROW(selection_features_from_json("{}"), std::invalid_argument);
  const std::string csv = trace_to_csv(t, r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')).empty(), false);
}

// Every subset of size m that satisfies k-AC, by brute force.
Rational best_same_size(const BinaryDataset& d, std::size_t k, std::size_t m,
                        Rational (*metric)(const BinaryDataset&, const FeatureSet&)) {
  Rational best;
  for (std::uint32_t mask = 0; mask < (1U << d.d()); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != m) continue;
    const FeatureSet s = mask_set(mask, d.d());
    if (!satisfies_k_ac(d, s, k)) continue;
    best = std::max(best, metric(d, s));
  }
  return best;
}

TEST(SelectorPropertyTest, ConstraintSafetyAndStructure) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 150; ++trial) {
    const BinaryDataset d = random_dataset(rng, 2 + rng() % 30, 1 + rng() % 10, 0.5);
    const std::size_t k = 1 + rng() % 5;
    for (const SelectionResult& r :
         {select_maximal(d, k), select_greedy_hamdist(d, k), select_greedy_distcnt(d, k),
          select_cm_greedy(d, k)}) {
      if (k > d.n()) continue;
      EXPECT_TRUE(satisfies_k_ac(d, r.features, k)) << method_name(r.method);
      EXPECT_EQ(r.achieved_ac, ac_of_projection(d, r.features));
      if (r.method != Method::kMaximal) {
        auto tf = trace_features(r);
        EXPECT_EQ(FeatureSet::from_unsorted(tf), r.features);
      }
    }
    const auto kh = select_greedy_kanon(d, k, Metric::kHamDist);
    const auto kd = select_greedy_kanon(d, k, Metric::kDistCnt);
    if (k <= d.n()) {
      EXPECT_TRUE(satisfies_k_anonymity(d, kh.features, k));
      EXPECT_TRUE(satisfies_k_anonymity(d, kd.features, k));
      EXPECT_LE(kh.features.size(), select_greedy_hamdist(d, k).features.size());
    }
    const auto m = select_maximal(d, k);
    if (k <= d.n()) { EXPECT_GE(support(d, m.features), k); }
  }
}

TEST(SelectorPropertyTest, DistCntGreedyApproximation) {
  std::mt19937_64 rng(43);
  const double bound = 1.0 - 1.0 / std::exp(1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const BinaryDataset d = random_dataset(rng, 4 + rng() % 30, 2 + rng() % 8, 0.5);
    const std::size_t k = 1 + rng() % 4;
    const SelectionResult r = select_greedy_distcnt(d, k);
    const Rational opt = best_same_size(d, k, r.features.size(), &dist_cnt);
    EXPECT_GE(r.dist_cnt.value(), bound * opt.value() - 1e-12);
  }
}

TEST(SelectorPropertyTest, HamDistGreedyPrefixOptimality) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 60; ++trial) {
    const BinaryDataset d = random_dataset(rng, 4 + rng() % 30, 2 + rng() % 8, 0.5);
    const std::size_t k = 1 + rng() % 4;
    const SelectionResult r = select_greedy_hamdist(d, k);
    // The greedy keeps the sorted prefix up to its break point, so it beats
    // every feasible set drawn from that prefix.
    const auto prefix = trace_features(r);
    for (std::uint32_t mask = 0; mask < (1U << prefix.size()); ++mask) {
      std::vector<FeatureIndex> sub;
      for (std::size_t i = 0; i < prefix.size(); ++i) {
        if ((mask >> i) & 1U) sub.push_back(prefix[i]);
      }
      const FeatureSet s = FeatureSet::from_unsorted(sub);
      if (satisfies_k_ac(d, s, k)) { EXPECT_GE(r.ham_dist, ham_dist(d, s)); }
    }
  }
}

}  // namespace
}  // namespace kac
