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

#include "kac/eval.hpp"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "json.hpp"
#include "test_support.hpp"

namespace kac {
namespace {

using ::kac::testing::make_dataset;
using ::kac::testing::random_dataset;
using ::kac::testing::toy;

constexpr Label P = Label::kPos;
constexpr Label N = Label::kNeg;

TEST(AucTest, PerfectReversedAndTies) {
  const std::vector<Label> labels{N, N, P, P};
  const std::vector<double> perfect{0.1, 0.2, 0.8, 0.9};
  const std::vector<double> reversed{0.9, 0.8, 0.2, 0.1};
  const std::vector<double> flat{1.0, 1.0, 1.0, 1.0};
  const std::vector<double> one_tie{0.1, 0.5, 0.5, 0.9};
  EXPECT_DOUBLE_EQ(auc(perfect, labels), 1.0);
  EXPECT_DOUBLE_EQ(auc(reversed, labels), 0.0);
  EXPECT_DOUBLE_EQ(auc(flat, labels), 0.5);
  // Pairs: (0.1 vs 0.5)=1, (0.1 vs 0.9)=1, (0.5 vs 0.5)=1/2, (0.5 vs 0.9)=1.
  EXPECT_DOUBLE_EQ(auc(one_tie, labels), 3.5 / 4.0);
  const std::vector<Label> one_class{P, P};
  const std::vector<double> two{0.0, 1.0};
  EXPECT_THROW(auc(two, one_class), std::invalid_argument);
}

TEST(AucTest, InvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(53);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + rng() % 40;
    std::vector<double> s(n);
    std::vector<double> t(n);
    std::vector<Label> l(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = std::round(gauss(rng) * 3.0);  // rounding creates ties
      t[i] = std::exp(s[i]) * 5.0 - 2.0;
      l[i] = (rng() & 1U) ? P : N;
    }
    l[0] = P;
    l[1] = N;
    // Brute-force Mann-Whitney over all pairs.
    double wins = 0.0;
    double pairs = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (l[a] != P || l[b] != N) continue;
        pairs += 1.0;
        wins += s[a] > s[b] ? 1.0 : (s[a] == s[b] ? 0.5 : 0.0);
      }
    }
    EXPECT_NEAR(auc(s, l), wins / pairs, 1e-12);
    EXPECT_NEAR(auc(s, l), auc(t, l), 1e-12);
  }
}

TEST(TrainerTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(59);
  const BinaryDataset d = random_dataset(rng, 30, 6, 0.5);
  const Matrix<double> x = design_matrix(d);
  const Vector<double> y = sign_labels(d);
  std::normal_distribution<double> gauss;
  for (int point = 0; point < 3; ++point) {
    Vector<double> theta = Vector<double>::Zero(x.cols());
    if (point > 0) {
      for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = gauss(rng);
    }
    const Vector<double> g = logistic_gradient(x, y, theta, 1.0);
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      Vector<double> up = theta;
      Vector<double> down = theta;
      up(i) += h;
      down(i) -= h;
      const double fd =
          (logistic_loss(x, y, up, 1.0) - logistic_loss(x, y, down, 1.0)) / (2.0 * h);
      EXPECT_NEAR(g(i), fd, 1e-6);
    }
  }
}

TEST(TrainerTest, TrainingLowersLoss) {
  std::mt19937_64 rng(61);
  const BinaryDataset d = random_dataset(rng, 60, 8, 0.5);
  const LinearModel m = train_linear(d);
  const Matrix<double> x = design_matrix(d);
  const Vector<double> y = sign_labels(d);
  const Vector<double> zero = Vector<double>::Zero(x.cols());
  EXPECT_LT(logistic_loss(x, y, m.theta, 1.0), logistic_loss(x, y, zero, 1.0));
  EXPECT_LT(logistic_gradient(x, y, m.theta, 1.0).norm(), 1e-3);
}

TEST(TrainerTest, DegenerateInputs) {
  const BinaryDataset sep = make_dataset({"1", "0"}, "+-");
  const LinearModel m = train_linear(sep);
  const Vector<double> s = m.scores(sep);
  EXPECT_GT(s(0), s(1));
  const std::vector<double> scores(s.data(), s.data() + s.size());
  EXPECT_DOUBLE_EQ(auc(scores, sep.labels()), 1.0);
  EXPECT_THROW(train_linear(make_dataset({"1", "0"}, "++")), std::invalid_argument);
}

TEST(CrossValidationTest, ZeroFeaturesGiveChance) {
  std::mt19937_64 rng(67);
  const BinaryDataset d = random_dataset(rng, 40, 5, 0.5);
  const EvalReport r = cross_validate(d, FeatureSet{}, {});
  for (double a : r.fold_aucs) EXPECT_DOUBLE_EQ(a, 0.5);
  EXPECT_EQ(r.feature_count, 0u);
}

TEST(CrossValidationTest, FoldsAreStratifiedAndDeterministic) {
  std::mt19937_64 rng(71);
  const BinaryDataset d = random_dataset(rng, 53, 5, 0.5);
  const auto a = stratified_folds(d, 5, 9);
  EXPECT_EQ(a, stratified_folds(d, 5, 9));
  std::vector<std::size_t> pos(5, 0);
  std::vector<std::size_t> all(5, 0);
  for (std::size_t e = 0; e < d.n(); ++e) {
    all[a[e]]++;
    if (d.label(e) == P) pos[a[e]]++;
  }
  const auto [pmin, pmax] = std::minmax_element(pos.begin(), pos.end());
  const auto [amin, amax] = std::minmax_element(all.begin(), all.end());
  EXPECT_LE(*pmax - *pmin, 1u);
  EXPECT_LE(*amax - *amin, 1u);
  EXPECT_THROW(stratified_folds(toy(), 4, 0), std::invalid_argument);
  EXPECT_THROW(stratified_folds(toy(), 1, 0), std::invalid_argument);

  const EvalReport r1 = cross_validate(d, FeatureSet{0, 1, 2}, {});
  const EvalReport r2 = cross_validate(d, FeatureSet{0, 1, 2}, {});
  EXPECT_EQ(r1.fold_aucs, r2.fold_aucs);
  EXPECT_EQ(r1.fold_aucs.size(), 5u);
  for (double v : r1.fold_aucs) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(CrossValidationTest, ToyMatchesManualHoldout) {
  const BinaryDataset t = toy();
  CvOptions opts;
  opts.folds = 3;
  opts.seed = 4;
  const EvalReport r = cross_validate(t, FeatureSet{0, 1, 4}, opts);
  const auto fold_of = stratified_folds(t, 3, 4);
  const BinaryDataset p = project(t, FeatureSet{0, 1, 4});
  ASSERT_EQ(r.fold_aucs.size(), 3u);
  for (std::size_t f = 0; f < 3; ++f) {
    std::vector<std::string> train_rows;
    std::string train_labels;
    std::vector<std::string> test_rows;
    std::string test_labels;
    for (EntityIndex e = 0; e < 6; ++e) {
      std::string bits;
      for (std::size_t j = 0; j < 3; ++j) bits += p.at(e, j) ? '1' : '0';
      const char l = t.label(e) == P ? '+' : '-';
      if (fold_of[e] == f) {
        test_rows.push_back(bits);
        test_labels += l;
      } else {
        train_rows.push_back(bits);
        train_labels += l;
      }
    }
    const BinaryDataset train = make_dataset(train_rows, train_labels);
    const BinaryDataset test = make_dataset(test_rows, test_labels);
    const Vector<double> s = train_linear(train).scores(test);
    ASSERT_EQ(s.size(), 2);
    // One POS and one NEG per fold.
    const double pos_score = test.label(0) == P ? s(0) : s(1);
    const double neg_score = test.label(0) == P ? s(1) : s(0);
    const double expected = pos_score > neg_score ? 1.0 : (pos_score == neg_score ? 0.5 : 0.0);
    EXPECT_DOUBLE_EQ(r.fold_aucs[f], expected) << "fold " << f;
  }
}

TEST(CrossValidationTest, DuplicatedDataHasZeroSpread) {
  // The third column separates the classes in every fold.
  std::vector<std::string> rows;
  std::string labels;
  for (int copy = 0; copy < 5; ++copy) {
    for (auto r : {"110", "100", "011", "001"}) rows.emplace_back(r);
    labels += "++--";
  }
  const BinaryDataset d = make_dataset(rows, labels);
  const EvalReport r = cross_validate(d, FeatureSet::all(3), {});
  EXPECT_DOUBLE_EQ(r.auc_mean, 1.0);
  EXPECT_DOUBLE_EQ(r.auc_std, 0.0);
}

TEST(BenchmarkTest, SfcNonIncreasingInK) {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 5; ++trial) {
    const BinaryDataset d = random_dataset(rng, 80, 10, 0.6);
    BenchmarkConfig cfg;
    cfg.methods = {Method::kGreedyHamDist};
    cfg.k_list = {5, 8, 11};
    const auto rows = benchmark(d, cfg);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_GE(rows[0].sfc, rows[1].sfc);
    EXPECT_GE(rows[1].sfc, rows[2].sfc);
  }
}

TEST(BenchmarkTest, DeterministicCsvWithoutTiming) {
  std::mt19937_64 rng(79);
  const BinaryDataset d = random_dataset(rng, 60, 8, 0.5);
  BenchmarkConfig cfg;
  cfg.methods = {Method::kGreedyHamDist, Method::kMaximal, Method::kLaplaceDp,
                 Method::kExponentialDp, Method::kFull};
  cfg.k_list = {2, 5};
  cfg.epsilon_list = {0.5, 2.0};
  cfg.dp_repeats = 3;
  cfg.seed = 12;
  cfg.threads = 1;
  const std::string one = benchmark_to_csv(benchmark(d, cfg), false);
  cfg.threads = 4;
  const std::string four = benchmark_to_csv(benchmark(d, cfg), false);
  EXPECT_EQ(one, four);
  EXPECT_EQ(one.substr(0, one.find('\n')), "method,param,sfc,auc_mean,auc_std,time");
  EXPECT_EQ(std::count(one.begin(), one.end(), '\n'), 10);
  EXPECT_EQ(one.find("FAILED"), std::string::npos);
  EXPECT_EQ(cell_seed(12, "maximal", "2"), cell_seed(12, "maximal", "2"));
  EXPECT_NE(cell_seed(12, "maximal", "2"), cell_seed(12, "maximal", "5"));
}

TEST(BenchmarkTest, FailingCellIsReported) {
  BenchmarkConfig cfg;
  cfg.methods = {Method::kGreedyHamDist};
  cfg.k_list = {1};
  cfg.folds = 5;  // Table 1 has only 3 entities per class.
  const auto rows = benchmark(toy(), cfg);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(rows[0].failed);
  EXPECT_NE(benchmark_to_csv(rows, false).find("greedy-hamdist,1,FAILED"), std::string::npos);
  const auto j = nlohmann::json::parse(benchmark_to_json(rows, false));
  EXPECT_EQ(j[0]["status"], "FAILED");
}

}  // namespace
}  // namespace kac
