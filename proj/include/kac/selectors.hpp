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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "kac/dataset.hpp"
#include "kac/miner.hpp"
#include "kac/utility.hpp"

namespace kac {

enum class Method {
  kMaximal,
  kGreedyHamDist,
  kGreedyDistCnt,
  kKanonHamDist,
  kKanonDistCnt,
  kCmGreedy,
  kLaplaceDp,
  kExponentialDp,
  kFull,
};

// "maximal", "greedy-hamdist", "greedy-distcnt", "kanon-hamdist",
// "kanon-distcnt", "cm-greedy", "laplace-dp", "exponential-dp", "full".
Method parse_method(std::string_view name);
std::string_view method_name(Method method);
bool is_dp_method(Method method);
bool is_kanon_method(Method method);
bool is_ac_method(Method method);

struct TraceStep {
  FeatureIndex feature = 0;
  double gain = 0.0;
  // Exact gain where the selector works with exact counts.
  std::optional<Rational> exact_gain;
};

struct SelectionResult {
  Method method = Method::kFull;
  std::optional<std::size_t> k;
  std::optional<double> epsilon;
  std::optional<std::uint64_t> seed;
  FeatureSet features;
  Rational ham_dist;
  Rational dist_cnt;
  std::uint64_t cm_penalty = 0;
  std::size_t achieved_ac = 0;
  std::vector<TraceStep> trace;
  std::vector<std::string> warnings;
};

struct MaximalOptions {
  std::size_t r = 20;
  MineOptions mine;
};

struct GreedyOptions {
  // Skip a violating feature and keep scanning instead of stopping there.
  bool continue_after_violation = false;
};

// Mines M_k, scores the first r sets (size descending, then lexicographic)
// by HamDist and returns the best (first on ties).
SelectionResult select_maximal(const BinaryDataset& data, std::size_t k,
                               const MaximalOptions& options = {});

// Features in non-increasing single-feature HamDist order (ties: lower
// index first) are added while AC stays >= k; stops at the first violation.
SelectionResult select_greedy_hamdist(const BinaryDataset& data, std::size_t k,
                                      const GreedyOptions& options = {});

// Adds the feature with the largest positive DistCnt gain (ties: lower
// index) while AC stays >= k. Stops when the best candidate would break
// the constraint or nothing has positive gain.
SelectionResult select_greedy_distcnt(const BinaryDataset& data, std::size_t k);

// The greedy selectors above with k-anonymity in place of k-AC.
SelectionResult select_greedy_kanon(const BinaryDataset& data, std::size_t k, Metric metric,
                                    const GreedyOptions& options = {});

// DistCnt-style greedy loop minimizing the CM penalty under AC >= k.
SelectionResult select_cm_greedy(const BinaryDataset& data, std::size_t k);

// Every feature; the no-privacy reference row.
SelectionResult select_full(const BinaryDataset& data);

// Sensitivity of the single-feature HamDist score: 1 / min(|E1|, |E2|).
double hamdist_sensitivity(const BinaryDataset& data);

// Top-N features by HamDist plus Laplace noise. Half of epsilon goes to
// selection and is split evenly over the N picks.
SelectionResult select_laplace_dp(const BinaryDataset& data, double epsilon,
                                  std::size_t num_features, std::uint64_t seed);

// N draws without replacement, each with probability proportional to
// exp(eps_i / (2 dH) * H(x)), eps_i = (epsilon / 2) / N.
SelectionResult select_exponential_dp(const BinaryDataset& data, double epsilon,
                                      std::size_t num_features, std::uint64_t seed);

// Dispatch on method. k is required for the constrained methods; epsilon
// and num_features for the DP methods. Throws std::invalid_argument on a
// missing or invalid parameter.
struct SelectRequest {
  Method method = Method::kGreedyHamDist;
  std::optional<std::size_t> k;
  std::optional<double> epsilon;
  std::optional<std::size_t> num_features;
  std::uint64_t seed = 0;
  MaximalOptions maximal;
  GreedyOptions greedy;
};
SelectionResult select(const BinaryDataset& data, const SelectRequest& request);

constexpr std::size_t kMaxReleaseFeatures = 20;

struct ReleaseResult {
  // Absent when every noisy count rounds to zero.
  std::optional<BinaryDataset> data;
  std::vector<std::string> warnings;
};

// Laplace(1/epsilon) noise on each of the 2^|S| x {POS, NEG} counts of
// project(data, features), rounded and clamped at zero; the synthetic
// dataset repeats each signature by its noisy count. Signatures are
// emitted in ascending order (bit j = features[j]), POS rows first.
ReleaseResult dp_release(const BinaryDataset& data, const FeatureSet& features, double epsilon,
                         std::uint64_t seed);

// Uniform and Laplace draws built directly from mt19937_64 output, whose
// sequence is fixed by the standard, so streams match across toolchains.
class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed) : engine_(seed) {}
  // Uniform in [0, 1).
  double uniform();
  double laplace(double scale);

 private:
  std::mt19937_64 engine_;
};

// Fills in utility values and achieved AC for features.
void score_selection(const BinaryDataset& data, SelectionResult& result);

std::string selection_to_json(const BinaryDataset& data, const SelectionResult& result);
std::string trace_to_csv(const BinaryDataset& data, const SelectionResult& result);
// Parses the "feature_indices" array of a selection JSON document.
FeatureSet selection_features_from_json(const std::string& text);

}  // namespace kac
