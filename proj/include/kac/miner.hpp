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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kac/dataset.hpp"

namespace kac {

// One entity in the transaction view: its containment set as an itemset.
struct Transaction {
  EntityIndex entity = 0;
  FeatureSet items;
};

std::vector<Transaction> transactions(const BinaryDataset& data);

struct MaximalSet {
  FeatureSet items;
  std::size_t support = 0;
  friend bool operator==(const MaximalSet&, const MaximalSet&) = default;
};

struct MaximalCollection {
  // Size descending, then lexicographic on feature indices.
  std::vector<MaximalSet> sets;
  std::size_t min_support = 0;
  // Set when max_results stopped the enumeration early.
  bool truncated = false;
};

struct MineOptions {
  // 0 means unlimited.
  std::size_t max_results = 0;
  // Workers for the top-level branches; 0 means hardware concurrency.
  std::size_t threads = 1;
};

// Number of entities whose containment set includes items; support of the
// empty set is n.
std::size_t support(const BinaryDataset& data, const FeatureSet& items);

// Maximal itemsets with support >= min_support over the transaction view.
// Each of them is a maximal feature set whose projection is min_support-AC.
// Throws std::invalid_argument for min_support < 1. min_support > n gives
// an empty collection.
MaximalCollection mine_maximal(const BinaryDataset& data, std::size_t min_support,
                               const MineOptions& options = {});

// Exhaustive reference: all 2^d subsets, d <= 20.
MaximalCollection brute_force_maximal(const BinaryDataset& data, std::size_t min_support);
// Every itemset (empty set excluded) with support >= min_support, d <= 20,
// sorted by size then lexicographic.
std::vector<FeatureSet> brute_force_frequent(const BinaryDataset& data,
                                             std::size_t min_support);

void sort_collection(std::vector<MaximalSet>& sets);

// "<support>\t<name>,<name>,..." per line.
std::string collection_to_text(const BinaryDataset& data, const MaximalCollection& c);
std::string collection_to_json(const BinaryDataset& data, const MaximalCollection& c);

}  // namespace kac
