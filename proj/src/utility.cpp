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

#include "kac/utility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace kac {

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g == 0 ? 0 : num / g;
  den_ = g == 0 ? 1 : den / g;
}

std::string Rational::str() const {
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
  const std::int64_t g = std::gcd(a.den_, b.den_);
  const __int128 num = static_cast<__int128>(a.num_) * (b.den_ / g) +
                       static_cast<__int128>(b.num_) * (a.den_ / g);
  const __int128 den = static_cast<__int128>(a.den_) * (b.den_ / g);
  if (num > std::numeric_limits<std::int64_t>::max() ||
      num < std::numeric_limits<std::int64_t>::min() ||
      den > std::numeric_limits<std::int64_t>::max()) {
    // Reduce in 128 bits before narrowing.
    __int128 x = num < 0 ? -num : num;
    __int128 y = den;
    while (y != 0) {
      const __int128 t = x % y;
      x = y;
      y = t;
    }
    return Rational(static_cast<std::int64_t>(num / x), static_cast<std::int64_t>(den / x));
  }
  return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

Rational operator-(const Rational& a, const Rational& b) {
  return a + Rational(-b.num_, b.den_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
  const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

namespace {

Rational ratio(std::uint64_t num, std::uint64_t den) {
  return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

struct ClassCounts {
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;
};

std::unordered_map<Bitset, ClassCounts, BitsetHash> projected_groups(
    const BinaryDataset& data, const FeatureSet& features) {
  check_features(data, features);
  Bitset mask(data.d());
  for (auto x : features) mask.set(x);
  std::unordered_map<Bitset, ClassCounts, BitsetHash> groups;
  for (std::size_t e = 0; e < data.n(); ++e) {
    auto& c = groups[data.row(e) & mask];
    (data.label(e) == Label::kPos ? c.pos : c.neg) += 1;
  }
  return groups;
}

}  // namespace

PairUniverse pair_universe(const BinaryDataset& data) {
  PairUniverse u;
  for (std::size_t e = 0; e < data.n(); ++e) {
    (data.label(e) == Label::kPos ? u.pos : u.neg).push_back(e);
  }
  if (u.pos.empty() || u.neg.empty()) {
    throw std::invalid_argument("utility metrics need both POS and NEG entities");
  }
  return u;
}

std::uint64_t feature_distance_sum(const BinaryDataset& data, FeatureIndex x) {
  if (x >= data.d()) throw std::out_of_range("feature " + std::to_string(x) + " out of range");
  const std::uint64_t pos = data.pos_count();
  const std::uint64_t neg = data.neg_count();
  const std::uint64_t pos1 = data.column(x).intersect_count(data.positives());
  const std::uint64_t neg1 = data.column(x).count() - pos1;
  return pos1 * (neg - neg1) + (pos - pos1) * neg1;
}

Rational ham_dist(const BinaryDataset& data, const FeatureSet& features) {
  const auto universe = pair_universe(data);
  check_features(data, features);
  std::uint64_t total = 0;
  for (auto x : features) total += feature_distance_sum(data, x);
  return ratio(total, universe.pair_count());
}

Rational dist_cnt(const BinaryDataset& data, const FeatureSet& features) {
  const auto universe = pair_universe(data);
  std::uint64_t same = 0;
  for (const auto& [signature, c] : projected_groups(data, features)) same += c.pos * c.neg;
  return ratio(universe.pair_count() - same, universe.pair_count());
}

std::uint64_t cm_penalty(const BinaryDataset& data, const FeatureSet& features) {
  std::uint64_t penalty = 0;
  for (const auto& [signature, c] : projected_groups(data, features)) {
    penalty += std::min(c.pos, c.neg);
  }
  return penalty;
}

GroupPartition::GroupPartition(const BinaryDataset& data)
    : data_(&data), pair_count_(static_cast<std::uint64_t>(data.pos_count()) * data.neg_count()) {
  Group all;
  all.members.resize(data.n());
  std::iota(all.members.begin(), all.members.end(), EntityIndex{0});
  all.pos = data.pos_count();
  all.neg = data.neg_count();
  groups_.push_back(std::move(all));
}

GroupPartition::GroupPartition(const BinaryDataset& data, const FeatureSet& features)
    : GroupPartition(data) {
  for (auto x : features) extend(x);
}

std::uint64_t GroupPartition::undistinguished_pairs() const {
  std::uint64_t same = 0;
  for (const auto& g : groups_) same += g.pos * g.neg;
  return same;
}

Rational GroupPartition::dist_cnt() const {
  if (pair_count_ == 0) {
    throw std::invalid_argument("utility metrics need both POS and NEG entities");
  }
  return ratio(pair_count_ - undistinguished_pairs(), pair_count_);
}

std::uint64_t GroupPartition::cm_penalty() const {
  std::uint64_t penalty = 0;
  for (const auto& g : groups_) penalty += std::min(g.pos, g.neg);
  return penalty;
}

std::size_t GroupPartition::min_group_size() const {
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (const auto& g : groups_) best = std::min(best, g.members.size());
  return best;
}

GroupPartition::Split GroupPartition::split(const Group& g, FeatureIndex x) const {
  const Bitset& column = data_->column(x);
  Split s{0, 0, 0, 0};
  for (auto e : g.members) {
    if (column.test(e)) {
      (data_->label(e) == Label::kPos ? s.pos1 : s.neg1) += 1;
    }
  }
  s.pos0 = g.pos - s.pos1;
  s.neg0 = g.neg - s.neg1;
  return s;
}

void GroupPartition::check_candidate(FeatureIndex x) const {
  if (x >= data_->d()) throw std::out_of_range("feature " + std::to_string(x) + " out of range");
  if (features_.contains(x)) {
    throw std::invalid_argument("feature " + std::to_string(x) + " already selected");
  }
}

std::uint64_t GroupPartition::distcnt_gain_pairs(FeatureIndex x) const {
  check_candidate(x);
  std::uint64_t gained = 0;
  for (const auto& g : groups_) {
    const Split s = split(g, x);
    gained += s.pos1 * s.neg0 + s.pos0 * s.neg1;
  }
  return gained;
}

std::uint64_t GroupPartition::cm_gain(FeatureIndex x) const {
  check_candidate(x);
  std::uint64_t gained = 0;
  for (const auto& g : groups_) {
    const Split s = split(g, x);
    gained += std::min(g.pos, g.neg) - std::min(s.pos1, s.neg1) - std::min(s.pos0, s.neg0);
  }
  return gained;
}

std::size_t GroupPartition::min_group_size_if_extended(FeatureIndex x) const {
  check_candidate(x);
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (const auto& g : groups_) {
    const Split s = split(g, x);
    const std::size_t ones = s.pos1 + s.neg1;
    const std::size_t zeros = s.pos0 + s.neg0;
    if (ones) best = std::min(best, ones);
    if (zeros) best = std::min(best, zeros);
  }
  return best;
}

void GroupPartition::extend(FeatureIndex x) {
  check_candidate(x);
  const Bitset& column = data_->column(x);
  std::vector<Group> next;
  next.reserve(groups_.size() * 2);
  for (auto& g : groups_) {
    Group ones;
    Group zeros;
    for (auto e : g.members) {
      Group& target = column.test(e) ? ones : zeros;
      target.members.push_back(e);
      (data_->label(e) == Label::kPos ? target.pos : target.neg) += 1;
    }
    if (!zeros.members.empty()) next.push_back(std::move(zeros));
    if (!ones.members.empty()) next.push_back(std::move(ones));
  }
  groups_ = std::move(next);
  features_ = features_.with(x);
}

Rational marginal_gain(Metric metric, const GroupPartition& state, FeatureIndex x) {
  if (state.pair_count() == 0) {
    throw std::invalid_argument("utility metrics need both POS and NEG entities");
  }
  if (metric == Metric::kDistCnt) return ratio(state.distcnt_gain_pairs(x), state.pair_count());
  if (state.features().contains(x)) {
    throw std::invalid_argument("feature " + std::to_string(x) + " already selected");
  }
  return ratio(feature_distance_sum(state.data(), x), state.pair_count());
}

double entropy_score(std::span<const double> probabilities) {
  double total = 0.0;
  double h = 0.0;
  for (double p : probabilities) {
    if (p < 0.0 || std::isnan(p)) throw std::invalid_argument("negative probability");
    total += p;
    if (p > 0.0) h -= p * std::log(p);
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("probabilities must sum to 1");
  }
  return h;
}

}  // namespace kac
