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

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kac/dataset.hpp"
#include "kac/selectors.hpp"

namespace kac {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// n x (d + 1) design matrix; the last column is the constant 1 intercept.
template <typename Scalar = double>
Matrix<Scalar> design_matrix(const BinaryDataset& data) {
  Matrix<Scalar> x = Matrix<Scalar>::Zero(static_cast<Eigen::Index>(data.n()),
                                          static_cast<Eigen::Index>(data.d() + 1));
  for (std::size_t e = 0; e < data.n(); ++e) {
    data.row(e).for_each_set([&](std::size_t j) {
      x(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(j)) = Scalar(1);
    });
    x(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(data.d())) = Scalar(1);
  }
  return x;
}

// +1 for POS, -1 for NEG.
template <typename Scalar = double>
Vector<Scalar> sign_labels(const BinaryDataset& data) {
  Vector<Scalar> y(static_cast<Eigen::Index>(data.n()));
  for (std::size_t e = 0; e < data.n(); ++e) {
    y(static_cast<Eigen::Index>(e)) = data.label(e) == Label::kPos ? Scalar(1) : Scalar(-1);
  }
  return y;
}

// Mean logistic loss plus (lambda / 2n) |w|^2; theta = [w; intercept] and
// the intercept is not penalized.
template <typename Derived, typename Scalar = typename Derived::Scalar>
Scalar logistic_loss(const Eigen::MatrixBase<Derived>& x, const Vector<Scalar>& y,
                     const Vector<Scalar>& theta, Scalar lambda) {
  const Scalar n = static_cast<Scalar>(x.rows());
  const Vector<Scalar> margin = y.cwiseProduct(x * theta);
  Scalar loss(0);
  for (Eigen::Index i = 0; i < margin.size(); ++i) {
    const Scalar m = margin(i);
    // log(1 + exp(-m)) without overflow.
    loss += m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
  }
  const auto w = theta.head(theta.size() - 1);
  return loss / n + lambda / (Scalar(2) * n) * w.squaredNorm();
}

template <typename Derived, typename Scalar = typename Derived::Scalar>
Vector<Scalar> logistic_gradient(const Eigen::MatrixBase<Derived>& x, const Vector<Scalar>& y,
                                 const Vector<Scalar>& theta, Scalar lambda) {
  const Scalar n = static_cast<Scalar>(x.rows());
  const Vector<Scalar> margin = y.cwiseProduct(x * theta);
  // d/dm log(1 + exp(-m)) = -sigmoid(-m)
  const Vector<Scalar> coeff = -y.cwiseProduct(
      margin.unaryExpr([](Scalar m) { return Scalar(1) / (Scalar(1) + std::exp(m)); }));
  Vector<Scalar> grad = x.transpose() * coeff / n;
  grad.head(grad.size() - 1) += lambda / n * theta.head(theta.size() - 1);
  return grad;
}

struct TrainOptions {
  double lambda = 1.0;
  std::size_t iterations = 1000;
};

struct LinearModel {
  // Feature weights followed by the intercept.
  Vector<double> theta;
  Vector<double> scores(const BinaryDataset& data) const { return design_matrix(data) * theta; }
};

// L2-regularized logistic regression by full-batch gradient descent from
// zero with the fixed step 1 / L, L = |X|_F^2 / (4n) + lambda / n (an upper
// bound on the loss curvature). Throws std::invalid_argument unless both
// classes are present.
LinearModel train_linear(const BinaryDataset& train, const TrainOptions& options = {});

// Mann-Whitney AUC: fraction of POS/NEG pairs ranked POS above NEG, ties
// counted one half. Throws std::invalid_argument if a class is absent.
double auc(std::span<const double> scores, std::span<const Label> labels);

struct EvalReport {
  std::string method;
  std::string param;
  std::size_t feature_count = 0;
  double auc_mean = 0.0;
  double auc_std = 0.0;
  std::vector<double> fold_aucs;
  std::uint64_t seed = 0;
  double wall_time = 0.0;
};

struct CvOptions {
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  TrainOptions train;
};

// Stratified fold assignment: each class is shuffled with the seed and
// dealt round-robin, NEG continuing where POS stopped. Returns the fold of
// every entity. Throws std::invalid_argument when a class has fewer
// entities than folds.
std::vector<std::size_t> stratified_folds(const BinaryDataset& data, std::size_t folds,
                                          std::uint64_t seed);

// Trains on folds-1 folds of project(data, features), scores the held-out
// fold; auc_std is the sample standard deviation over folds.
EvalReport cross_validate(const BinaryDataset& data, const FeatureSet& features,
                          const CvOptions& options = {});

struct BenchmarkConfig {
  std::vector<Method> methods;
  std::vector<std::size_t> k_list;
  std::vector<double> epsilon_list;
  // DP feature count; defaults to the greedy-hamdist count at k_list[0].
  std::optional<std::size_t> num_features;
  std::uint64_t seed = 0;
  std::size_t folds = 5;
  // Independent runs averaged for the randomized DP methods.
  std::size_t dp_repeats = 10;
  std::size_t threads = 1;
  MaximalOptions maximal;
  GreedyOptions greedy;
  TrainOptions train;
};

struct BenchmarkRow {
  std::string method;
  std::string param;
  std::size_t sfc = 0;
  double auc_mean = 0.0;
  double auc_std = 0.0;
  double time = 0.0;
  bool failed = false;
  std::string error;
};

// Runs select -> project -> cross_validate for every (method, parameter)
// cell. AC and k-anonymity selections are re-audited; a violation marks the
// cell FAILED. Cell failures never abort the sweep.
std::vector<BenchmarkRow> benchmark(const BinaryDataset& data, const BenchmarkConfig& config);

// method,param,sfc,auc_mean,auc_std,time
std::string benchmark_to_csv(const std::vector<BenchmarkRow>& rows, bool include_time = true);
std::string benchmark_to_json(const std::vector<BenchmarkRow>& rows, bool include_time = true);
std::string eval_report_to_json(const EvalReport& report);

// Seed of one benchmark cell, derived from the run seed and the cell's
// identity so results do not depend on scheduling.
std::uint64_t cell_seed(std::uint64_t seed, std::string_view method, std::string_view param);

}  // namespace kac
