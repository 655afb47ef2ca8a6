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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kac/bitset.hpp"
#include "kac/dataset.hpp"

namespace kac {

// AC(e) counts every entity whose containment set is a superset of e's,
// e included, so it is always at least 1 (the anonymous-group size).
std::size_t ac_of_entity(const BinaryDataset& data, EntityIndex e);
std::vector<std::size_t> per_entity_ac(const BinaryDataset& data);
std::size_t ac_of_dataset(const BinaryDataset& data);

// AC of project(data, features), computed on the column view without
// building the projection. Identical projected rows are counted once.
std::size_t ac_of_projection(const BinaryDataset& data, const FeatureSet& features);

// Throws std::invalid_argument for k < 1.
bool satisfies_k_ac(const BinaryDataset& data, const FeatureSet& features, std::size_t k);
bool satisfies_k_anonymity(const BinaryDataset& data, const FeatureSet& features,
                           std::size_t k);

// Sizes of the identical-row equivalence classes of project(data, features),
// as class size -> number of classes.
std::map<std::size_t, std::size_t> kanon_class_sizes(const BinaryDataset& data,
                                                     const FeatureSet& features);

struct PrivacyAudit {
  std::vector<std::size_t> per_entity_ac;
  std::size_t dataset_ac = 0;
  std::map<std::size_t, std::size_t> kanon_class_sizes;
  std::optional<std::size_t> k_checked;
  std::optional<bool> satisfied;
};

PrivacyAudit audit(const BinaryDataset& data, std::optional<std::size_t> k = std::nullopt);

// {dataset_ac, per_entity_ac[], class_size_histogram{}, k, satisfied}; k and
// satisfied are null when no k was checked.
std::string audit_to_json(const PrivacyAudit& report);

// Incremental AC engine for growing a feature set one feature at a time.
// Entities with identical projected rows share one group and one supporter
// bit vector (entities whose projected containment set contains theirs).
// Adding feature x only touches groups whose members have x set: their
// supporters are intersected with column x.
//
// Holds a reference to the dataset, which must outlive the state.
class ACState {
 public:
  explicit ACState(const BinaryDataset& data);
  ACState(const BinaryDataset& data, const FeatureSet& features);

  const FeatureSet& features() const { return features_; }
  std::size_t dataset_ac() const { return dataset_ac_; }
  const Bitset& supporters(EntityIndex e) const;
  std::size_t group_count() const { return groups_.size(); }

  // dataset_ac() after adding x, without changing the state.
  std::size_t ac_if_extended(FeatureIndex x) const;
  // Adds x and returns the new dataset AC. Throws std::invalid_argument if
  // x is already selected, std::out_of_range if x >= d.
  std::size_t extend(FeatureIndex x);
  ACState extended(FeatureIndex x) const;

 private:
  struct Group {
    std::vector<EntityIndex> members;
    Bitset supporters;
  };

  void check_candidate(FeatureIndex x) const;
  void recompute_ac();

  const BinaryDataset* data_;
  FeatureSet features_;
  std::vector<Group> groups_;
  std::vector<std::size_t> group_of_;
  std::size_t dataset_ac_ = 0;
};

}  // namespace kac
