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

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "kac/privacy.hpp"

namespace kac {
namespace {

constexpr std::array<std::pair<Method, std::string_view>, 9> kMethodNames = {{
    {Method::kMaximal, "maximal"},
    {Method::kGreedyHamDist, "greedy-hamdist"},
    {Method::kGreedyDistCnt, "greedy-distcnt"},
    {Method::kKanonHamDist, "kanon-hamdist"},
    {Method::kKanonDistCnt, "kanon-distcnt"},
    {Method::kCmGreedy, "cm-greedy"},
    {Method::kLaplaceDp, "laplace-dp"},
    {Method::kExponentialDp, "exponential-dp"},
    {Method::kFull, "full"},
}};

void check_k(std::size_t k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
}

// Privacy constraint adapters for the greedy loops.
class AcConstraint {
 public:
  AcConstraint(const BinaryDataset& data, std::size_t k) : state_(data), k_(k) {}
  bool holds() const { return state_.dataset_ac() >= k_; }
  bool allows(FeatureIndex x) const { return state_.ac_if_extended(x) >= k_; }
  void add(FeatureIndex x) { state_.extend(x); }

 private:
  ACState state_;
  std::size_t k_;
};

class KAnonConstraint {
 public:
  KAnonConstraint(const BinaryDataset& data, std::size_t k) : groups_(data), k_(k) {}
  bool holds() const { return groups_.min_group_size() >= k_; }
  bool allows(FeatureIndex x) const { return groups_.min_group_size_if_extended(x) >= k_; }
  void add(FeatureIndex x) { groups_.extend(x); }

 private:
  GroupPartition groups_;
  std::size_t k_;
};

const char* kInfeasible = "k exceeds the entity count; no feature set satisfies the constraint";

template <typename Constraint>
SelectionResult greedy_hamdist(const BinaryDataset& data, std::size_t k, Method method,
                               const GreedyOptions& options) {
  check_k(k);
  const auto universe = pair_universe(data);
  SelectionResult result;
  result.method = method;
  result.k = k;

  std::vector<FeatureIndex> order(data.d());
  std::iota(order.begin(), order.end(), FeatureIndex{0});
  std::vector<std::uint64_t> sums(data.d());
  for (std::size_t x = 0; x < data.d(); ++x) sums[x] = feature_distance_sum(data, x);
  std::stable_sort(order.begin(), order.end(),
                   [&](FeatureIndex a, FeatureIndex b) { return sums[a] > sums[b]; });

  Constraint constraint(data, k);
  std::vector<FeatureIndex> chosen;
  if (!constraint.holds()) {
    result.warnings.emplace_back(kInfeasible);
  } else {
    for (auto x : order) {
      if (!constraint.allows(x)) {
        if (options.continue_after_violation) continue;
        break;
      }
      constraint.add(x);
      chosen.push_back(x);
      const Rational gain(static_cast<std::int64_t>(sums[x]),
                          static_cast<std::int64_t>(universe.pair_count()));
      result.trace.push_back(TraceStep{x, gain.value(), gain});
    }
  }
  if (chosen.empty() && result.warnings.empty()) {
    result.warnings.emplace_back("no feature can be added without violating the constraint");
  }
  result.features = FeatureSet::from_unsorted(std::move(chosen));
  score_selection(data, result);
  return result;
}

// Shared loop of the DistCnt and CM greedy selectors: gain_pairs(groups, x)
// returns the integer improvement of adding x, denominator scales it.
template <typename Constraint, typename Gain>
SelectionResult greedy_submodular(const BinaryDataset& data, std::size_t k, Method method,
                                  Gain&& gain_of, std::uint64_t denominator) {
  check_k(k);
  SelectionResult result;
  result.method = method;
  result.k = k;
  GroupPartition groups(data);
  Constraint constraint(data, k);
  std::vector<FeatureIndex> chosen;

  if (!constraint.holds()) {
    result.warnings.emplace_back(kInfeasible);
  } else {
    while (true) {
      std::optional<FeatureIndex> best;
      std::uint64_t best_gain = 0;
      for (std::size_t x = 0; x < data.d(); ++x) {
        if (groups.features().contains(x)) continue;
        const std::uint64_t g = gain_of(groups, x);
        if (g > best_gain) {
          best_gain = g;
          best = x;
        }
      }
      if (!best) break;
      if (!constraint.allows(*best)) break;
      constraint.add(*best);
      groups.extend(*best);
      chosen.push_back(*best);
      const Rational gain(static_cast<std::int64_t>(best_gain),
                          static_cast<std::int64_t>(denominator));
      result.trace.push_back(TraceStep{*best, gain.value(), gain});
    }
  }
  result.features = FeatureSet::from_unsorted(std::move(chosen));
  score_selection(data, result);
  return result;
}

template <typename Constraint>
SelectionResult greedy_distcnt(const BinaryDataset& data, std::size_t k, Method method) {
  const auto universe = pair_universe(data);
  return greedy_submodular<Constraint>(
      data, k, method,
      [](const GroupPartition& g, FeatureIndex x) { return g.distcnt_gain_pairs(x); },
      universe.pair_count());
}

void check_dp(const BinaryDataset& data, double epsilon, std::size_t num_features) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be a positive finite number");
  }
  if (num_features < 1 || num_features > data.d()) {
    throw std::invalid_argument("number of features must be in [1, " +
                                std::to_string(data.d()) + "]");
  }
}

std::vector<double> single_feature_hamdist(const BinaryDataset& data) {
  const auto universe = pair_universe(data);
  std::vector<double> scores(data.d());
  for (std::size_t x = 0; x < data.d(); ++x) {
    scores[x] = static_cast<double>(feature_distance_sum(data, x)) /
                static_cast<double>(universe.pair_count());
  }
  return scores;
}

nlohmann::ordered_json rational_json(const Rational& r) {
  nlohmann::ordered_json j;
  j["num"] = r.num();
  j["den"] = r.den();
  j["value"] = r.value();
  return j;
}

}  // namespace

Method parse_method(std::string_view name) {
  for (const auto& [m, n] : kMethodNames) {
    if (n == name) return m;
  }
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::string_view method_name(Method method) {
  for (const auto& [m, n] : kMethodNames) {
    if (m == method) return n;
  }
  return "unknown";
}

bool is_dp_method(Method method) {
  return method == Method::kLaplaceDp || method == Method::kExponentialDp;
}

bool is_kanon_method(Method method) {
  return method == Method::kKanonHamDist || method == Method::kKanonDistCnt;
}

bool is_ac_method(Method method) {
  return method == Method::kMaximal || method == Method::kGreedyHamDist ||
         method == Method::kGreedyDistCnt || method == Method::kCmGreedy;
}

void score_selection(const BinaryDataset& data, SelectionResult& result) {
  result.ham_dist = ham_dist(data, result.features);
  result.dist_cnt = dist_cnt(data, result.features);
  result.cm_penalty = cm_penalty(data, result.features);
  result.achieved_ac = ac_of_projection(data, result.features);
}

SelectionResult select_maximal(const BinaryDataset& data, std::size_t k,
                               const MaximalOptions& options) {
  check_k(k);
  if (options.r < 1) throw std::invalid_argument("r must be >= 1");
  pair_universe(data);
  SelectionResult result;
  result.method = Method::kMaximal;
  result.k = k;

  const MaximalCollection collection = mine_maximal(data, k, options.mine);
  if (collection.truncated) {
    result.warnings.push_back("maximal set enumeration stopped at " +
                              std::to_string(collection.sets.size()) + " results");
  }
  if (collection.sets.empty()) {
    result.warnings.emplace_back(kInfeasible);
  } else {
    const std::size_t candidates = std::min(options.r, collection.sets.size());
    std::size_t best = 0;
    Rational best_score = ham_dist(data, collection.sets[0].items);
    for (std::size_t i = 1; i < candidates; ++i) {
      const Rational score = ham_dist(data, collection.sets[i].items);
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    result.features = collection.sets[best].items;
  }
  score_selection(data, result);
  return result;
}

SelectionResult select_greedy_hamdist(const BinaryDataset& data, std::size_t k,
                                      const GreedyOptions& options) {
  return greedy_hamdist<AcConstraint>(data, k, Method::kGreedyHamDist, options);
}

SelectionResult select_greedy_distcnt(const BinaryDataset& data, std::size_t k) {
  return greedy_distcnt<AcConstraint>(data, k, Method::kGreedyDistCnt);
}

SelectionResult select_greedy_kanon(const BinaryDataset& data, std::size_t k, Metric metric,
                                    const GreedyOptions& options) {
  if (metric == Metric::kHamDist) {
    return greedy_hamdist<KAnonConstraint>(data, k, Method::kKanonHamDist, options);
  }
  return greedy_distcnt<KAnonConstraint>(data, k, Method::kKanonDistCnt);
}

SelectionResult select_cm_greedy(const BinaryDataset& data, std::size_t k) {
  pair_universe(data);
  return greedy_submodular<AcConstraint>(
      data, k, Method::kCmGreedy,
      [](const GroupPartition& g, FeatureIndex x) { return g.cm_gain(x); }, 1);
}

SelectionResult select_full(const BinaryDataset& data) {
  SelectionResult result;
  result.method = Method::kFull;
  result.features = FeatureSet::all(data.d());
  score_selection(data, result);
  return result;
}

double hamdist_sensitivity(const BinaryDataset& data) {
  const auto universe = pair_universe(data);
  return 1.0 / static_cast<double>(std::min(universe.pos.size(), universe.neg.size()));
}

double NoiseSource::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double NoiseSource::laplace(double scale) {
  // Inverse CDF on u in (-1/2, 1/2).
  double u = uniform() - 0.5;
  while (u == -0.5) u = uniform() - 0.5;
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0 ? -magnitude : magnitude;
}

SelectionResult select_laplace_dp(const BinaryDataset& data, double epsilon,
                                  std::size_t num_features, std::uint64_t seed) {
  check_dp(data, epsilon, num_features);
  SelectionResult result;
  result.method = Method::kLaplaceDp;
  result.epsilon = epsilon;
  result.seed = seed;

  const std::vector<double> scores = single_feature_hamdist(data);
  const double per_pick = (epsilon / 2.0) / static_cast<double>(num_features);
  const double scale = hamdist_sensitivity(data) / per_pick;
  NoiseSource noise(seed);
  std::vector<double> noisy(data.d());
  for (std::size_t x = 0; x < data.d(); ++x) noisy[x] = scores[x] + noise.laplace(scale);

  std::vector<FeatureIndex> order(data.d());
  std::iota(order.begin(), order.end(), FeatureIndex{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](FeatureIndex a, FeatureIndex b) { return noisy[a] > noisy[b]; });
  order.resize(num_features);
  for (auto x : order) result.trace.push_back(TraceStep{x, noisy[x], std::nullopt});
  result.features = FeatureSet::from_unsorted(std::move(order));
  score_selection(data, result);
  return result;
}

SelectionResult select_exponential_dp(const BinaryDataset& data, double epsilon,
                                      std::size_t num_features, std::uint64_t seed) {
  check_dp(data, epsilon, num_features);
  SelectionResult result;
  result.method = Method::kExponentialDp;
  result.epsilon = epsilon;
  result.seed = seed;

  const std::vector<double> scores = single_feature_hamdist(data);
  const double per_draw = (epsilon / 2.0) / static_cast<double>(num_features);
  const double factor = per_draw / (2.0 * hamdist_sensitivity(data));
  NoiseSource noise(seed);
  std::vector<bool> taken(data.d(), false);
  std::vector<FeatureIndex> chosen;
  std::vector<double> weights(data.d());
  for (std::size_t draw = 0; draw < num_features; ++draw) {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < data.d(); ++x) {
      if (!taken[x]) top = std::max(top, factor * scores[x]);
    }
    double total = 0.0;
    for (std::size_t x = 0; x < data.d(); ++x) {
      weights[x] = taken[x] ? 0.0 : std::exp(factor * scores[x] - top);
      total += weights[x];
    }
    const double target = noise.uniform() * total;
    double acc = 0.0;
    FeatureIndex pick = data.d();
    for (std::size_t x = 0; x < data.d(); ++x) {
      if (taken[x]) continue;
      pick = x;
      acc += weights[x];
      if (target < acc) break;
    }
    taken[pick] = true;
    chosen.push_back(pick);
    result.trace.push_back(TraceStep{pick, scores[pick], std::nullopt});
  }
  result.features = FeatureSet::from_unsorted(std::move(chosen));
  score_selection(data, result);
  return result;
}

SelectionResult select(const BinaryDataset& data, const SelectRequest& request) {
  auto need_k = [&] {
    if (!request.k) {
      throw std::invalid_argument(std::string(method_name(request.method)) + " needs k");
    }
    return *request.k;
  };
  auto need_dp = [&] {
    if (!request.epsilon || !request.num_features) {
      throw std::invalid_argument(std::string(method_name(request.method)) +
                                  " needs epsilon and a feature count");
    }
  };
  switch (request.method) {
    case Method::kMaximal: return select_maximal(data, need_k(), request.maximal);
    case Method::kGreedyHamDist: return select_greedy_hamdist(data, need_k(), request.greedy);
    case Method::kGreedyDistCnt: return select_greedy_distcnt(data, need_k());
    case Method::kKanonHamDist:
      return select_greedy_kanon(data, need_k(), Metric::kHamDist, request.greedy);
    case Method::kKanonDistCnt:
      return select_greedy_kanon(data, need_k(), Metric::kDistCnt, request.greedy);
    case Method::kCmGreedy: return select_cm_greedy(data, need_k());
    case Method::kLaplaceDp:
      need_dp();
      return select_laplace_dp(data, *request.epsilon, *request.num_features, request.seed);
    case Method::kExponentialDp:
      need_dp();
      return select_exponential_dp(data, *request.epsilon, *request.num_features, request.seed);
    case Method::kFull: return select_full(data);
  }
  throw std::logic_error("unhandled method");
}

ReleaseResult dp_release(const BinaryDataset& data, const FeatureSet& features, double epsilon,
                         std::uint64_t seed) {
  check_features(data, features);
  if (features.size() > kMaxReleaseFeatures) {
    throw std::invalid_argument("release needs at most " + std::to_string(kMaxReleaseFeatures) +
                                " features, got " + std::to_string(features.size()));
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be a positive finite number");
  }
  const std::size_t m = features.size();
  const std::size_t cells = std::size_t{1} << m;
  // counts[2 * signature + (label == NEG)]
  std::vector<double> counts(2 * cells, 0.0);
  for (std::size_t e = 0; e < data.n(); ++e) {
    std::size_t signature = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (data.at(e, features[j])) signature |= std::size_t{1} << j;
    }
    counts[2 * signature + (data.label(e) == Label::kNeg ? 1 : 0)] += 1.0;
  }

  NoiseSource noise(seed);
  const double scale = 1.0 / epsilon;
  std::vector<Bitset> rows;
  std::vector<Label> labels;
  for (std::size_t cell = 0; cell < counts.size(); ++cell) {
    const double noisy = std::round(counts[cell] + noise.laplace(scale));
    if (noisy <= 0.0) continue;
    const std::size_t signature = cell / 2;
    Bitset row(m);
    for (std::size_t j = 0; j < m; ++j) row.set(j, ((signature >> j) & 1U) != 0);
    const Label label = cell % 2 == 0 ? Label::kPos : Label::kNeg;
    for (std::size_t c = 0; c < static_cast<std::size_t>(noisy); ++c) {
      rows.push_back(row);
      labels.push_back(label);
    }
  }

  ReleaseResult out;
  if (rows.empty()) {
    out.warnings.emplace_back("every noisy count rounded to zero; nothing released");
    return out;
  }
  std::vector<std::string> names;
  for (auto x : features) names.push_back(data.feature_name(x));
  out.data.emplace(m, std::move(rows), std::move(labels), std::move(names));
  return out;
}

std::string selection_to_json(const BinaryDataset& data, const SelectionResult& result) {
  nlohmann::ordered_json j;
  j["method"] = method_name(result.method);
  j["k"] = result.k ? nlohmann::ordered_json(*result.k) : nullptr;
  j["epsilon"] = result.epsilon ? nlohmann::ordered_json(*result.epsilon) : nullptr;
  j["seed"] = result.seed ? nlohmann::ordered_json(*result.seed) : nullptr;
  std::vector<std::string> names;
  for (auto x : result.features) names.push_back(data.feature_name(x));
  j["features"] = names;
  j["feature_indices"] =
      std::vector<FeatureIndex>(result.features.begin(), result.features.end());
  j["feature_count"] = result.features.size();
  nlohmann::ordered_json utility;
  utility["ham_dist"] = rational_json(result.ham_dist);
  utility["dist_cnt"] = rational_json(result.dist_cnt);
  utility["cm_penalty"] = result.cm_penalty;
  j["utility"] = utility;
  j["achieved_ac"] = result.achieved_ac;
  j["trace"] = nlohmann::ordered_json::array();
  for (const auto& step : result.trace) {
    nlohmann::ordered_json s;
    s["feature"] = data.feature_name(step.feature);
    s["gain"] = step.exact_gain ? rational_json(*step.exact_gain)
                                : nlohmann::ordered_json(step.gain);
    j["trace"].push_back(s);
  }
  j["warnings"] = result.warnings;
  return j.dump(2) + "\n";
}

std::string trace_to_csv(const BinaryDataset& data, const SelectionResult& result) {
  std::string out = "step,feature,gain\n";
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    const auto& step = result.trace[i];
    nlohmann::json gain = step.gain;
    out += std::to_string(i + 1) + "," + data.feature_name(step.feature) + "," + gain.dump() +
           "\n";
  }
  return out;
}

FeatureSet selection_features_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (!j.contains("feature_indices")) {
    throw std::invalid_argument("selection JSON lacks 'feature_indices'");
  }
  return FeatureSet::from_unsorted(j.at("feature_indices").get<std::vector<FeatureIndex>>());
}

}  // namespace kac
