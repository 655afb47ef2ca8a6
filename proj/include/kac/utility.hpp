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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kac/dataset.hpp"

namespace kac {

// Exact non-negative-denominator fraction, kept in lowest terms.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  Rational& operator+=(const Rational& other) { return *this = *this + other; }
  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

// Entities split by label: E1 = POS, E2 = NEG.
struct PairUniverse {
  std::vector<EntityIndex> pos;
  std::vector<EntityIndex> neg;
  std::uint64_t pair_count() const {
    return static_cast<std::uint64_t>(pos.size()) * neg.size();
  }
};

// Throws std::invalid_argument when either class is empty.
PairUniverse pair_universe(const BinaryDataset& data);

// Number of cross-class pairs that differ on feature x.
std::uint64_t feature_distance_sum(const BinaryDataset& data, FeatureIndex x);

// Average Hamming distance between projected POS/NEG pairs.
Rational ham_dist(const BinaryDataset& data, const FeatureSet& features);
// Fraction of POS/NEG pairs whose projections differ.
Rational dist_cnt(const BinaryDataset& data, const FeatureSet& features);
// Sum over identical-projection groups of the minority class count.
std::uint64_t cm_penalty(const BinaryDataset& data, const FeatureSet& features);

// Identical-projection groups of the entities with POS/NEG counts, refined
// one feature at a time. Drives DistCnt and CM gains and the k-anonymity
// check inside the greedy selectors. Holds a reference to the dataset.
class GroupPartition {
 public:
  struct Group {
    std::vector<EntityIndex> members;
    std::uint64_t pos = 0;
    std::uint64_t neg = 0;
  };

  explicit GroupPartition(const BinaryDataset& data);
  GroupPartition(const BinaryDataset& data, const FeatureSet& features);

  const BinaryDataset& data() const { return *data_; }
  const FeatureSet& features() const { return features_; }
  std::span<const Group> groups() const { return groups_; }

  // Cross-class pairs that share a projection.
  std::uint64_t undistinguished_pairs() const;
  std::uint64_t pair_count() const { return pair_count_; }
  Rational dist_cnt() const;
  std::uint64_t cm_penalty() const;
  std::size_t min_group_size() const;

  // Cross-class pairs newly separated by adding x.
  std::uint64_t distcnt_gain_pairs(FeatureIndex x) const;
  // Reduction of cm_penalty() from adding x (never negative).
  std::uint64_t cm_gain(FeatureIndex x) const;
  // min_group_size() after adding x.
  std::size_t min_group_size_if_extended(FeatureIndex x) const;

  // Throws std::invalid_argument if x is already present.
  void extend(FeatureIndex x);

 private:
  struct Split {
    std::uint64_t pos1, neg1, pos0, neg0;
  };
  Split split(const Group& g, FeatureIndex x) const;
  void check_candidate(FeatureIndex x) const;

  const BinaryDataset* data_;
  FeatureSet features_;
  std::vector<Group> groups_;
  std::uint64_t pair_count_;
};

enum class Metric { kHamDist, kDistCnt };

// Exact f(S + x) - f(S) where S = state.features(). HamDist gains do not
// depend on S. Throws std::invalid_argument if x is already in S.
Rational marginal_gain(Metric metric, const GroupPartition& state, FeatureIndex x);

// -sum p ln p with 0 ln 0 = 0. Throws std::invalid_argument on negative
// entries or when the entries do not sum to 1 within 1e-9.
double entropy_score(std::span<const double> probabilities);

}  // namespace kac
