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

#include "kac/privacy.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace kac {
namespace {

void check_k(std::size_t k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
}

Bitset feature_mask(const BinaryDataset& data, const FeatureSet& features) {
  check_features(data, features);
  Bitset mask(data.d());
  for (auto x : features) mask.set(x);
  return mask;
}

// Entities that contain every feature set in signature.
Bitset supporters_of(const BinaryDataset& data, const Bitset& signature) {
  Bitset s(data.n(), true);
  signature.for_each_set([&](std::size_t x) { s &= data.column(x); });
  return s;
}

// Distinct projected rows with their multiplicity.
std::unordered_map<Bitset, std::size_t, BitsetHash> projected_rows(const BinaryDataset& data,
                                                                   const Bitset& mask) {
  std::unordered_map<Bitset, std::size_t, BitsetHash> rows;
  for (std::size_t e = 0; e < data.n(); ++e) ++rows[data.row(e) & mask];
  return rows;
}

}  // namespace

std::size_t ac_of_entity(const BinaryDataset& data, EntityIndex e) {
  if (e >= data.n()) {
    throw std::out_of_range("entity " + std::to_string(e) + " out of range for n=" +
                            std::to_string(data.n()));
  }
  return supporters_of(data, data.row(e)).count();
}

std::vector<std::size_t> per_entity_ac(const BinaryDataset& data) {
  std::unordered_map<Bitset, std::size_t, BitsetHash> cache;
  std::vector<std::size_t> out(data.n());
  for (std::size_t e = 0; e < data.n(); ++e) {
    auto [it, inserted] = cache.try_emplace(data.row(e), 0);
    if (inserted) it->second = supporters_of(data, data.row(e)).count();
    out[e] = it->second;
  }
  return out;
}

std::size_t ac_of_dataset(const BinaryDataset& data) {
  return ac_of_projection(data, FeatureSet::all(data.d()));
}

std::size_t ac_of_projection(const BinaryDataset& data, const FeatureSet& features) {
  if (data.n() == 0) throw std::invalid_argument("AC of an empty dataset is undefined");
  const Bitset mask = feature_mask(data, features);
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (const auto& [signature, multiplicity] : projected_rows(data, mask)) {
    best = std::min(best, supporters_of(data, signature).count());
  }
  return best;
}

bool satisfies_k_ac(const BinaryDataset& data, const FeatureSet& features, std::size_t k) {
  check_k(k);
  return ac_of_projection(data, features) >= k;
}

std::map<std::size_t, std::size_t> kanon_class_sizes(const BinaryDataset& data,
                                                     const FeatureSet& features) {
  std::map<std::size_t, std::size_t> histogram;
  for (const auto& [signature, size] : projected_rows(data, feature_mask(data, features))) {
    ++histogram[size];
  }
  return histogram;
}

bool satisfies_k_anonymity(const BinaryDataset& data, const FeatureSet& features,
                           std::size_t k) {
  check_k(k);
  const auto histogram = kanon_class_sizes(data, features);
  return histogram.empty() || histogram.begin()->first >= k;
}

PrivacyAudit audit(const BinaryDataset& data, std::optional<std::size_t> k) {
  if (k) check_k(*k);
  PrivacyAudit report;
  report.per_entity_ac = per_entity_ac(data);
  report.dataset_ac =
      *std::min_element(report.per_entity_ac.begin(), report.per_entity_ac.end());
  report.kanon_class_sizes = kanon_class_sizes(data, FeatureSet::all(data.d()));
  if (k) {
    report.k_checked = k;
    report.satisfied = report.dataset_ac >= *k;
  }
  return report;
}

std::string audit_to_json(const PrivacyAudit& report) {
  nlohmann::ordered_json j;
  j["dataset_ac"] = report.dataset_ac;
  j["per_entity_ac"] = report.per_entity_ac;
  nlohmann::ordered_json hist = nlohmann::ordered_json::object();
  for (const auto& [size, count] : report.kanon_class_sizes) {
    hist[std::to_string(size)] = count;
  }
  j["class_size_histogram"] = hist;
  j["k"] = report.k_checked ? nlohmann::ordered_json(*report.k_checked) : nullptr;
  j["satisfied"] = report.satisfied ? nlohmann::ordered_json(*report.satisfied) : nullptr;
  return j.dump(2);
}

ACState::ACState(const BinaryDataset& data) : data_(&data), group_of_(data.n(), 0) {
  Group all{{}, Bitset(data.n(), true)};
  all.members.resize(data.n());
  for (std::size_t e = 0; e < data.n(); ++e) all.members[e] = e;
  groups_.push_back(std::move(all));
  recompute_ac();
}

ACState::ACState(const BinaryDataset& data, const FeatureSet& features) : ACState(data) {
  for (auto x : features) extend(x);
}

const Bitset& ACState::supporters(EntityIndex e) const {
  return groups_[group_of_.at(e)].supporters;
}

void ACState::check_candidate(FeatureIndex x) const {
  if (x >= data_->d()) {
    throw std::out_of_range("feature " + std::to_string(x) + " out of range");
  }
  if (features_.contains(x)) {
    throw std::invalid_argument("feature " + std::to_string(x) + " already selected");
  }
}

std::size_t ACState::ac_if_extended(FeatureIndex x) const {
  check_candidate(x);
  const Bitset& column = data_->column(x);
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (const auto& g : groups_) {
    bool with_x = false;
    bool without_x = false;
    for (auto e : g.members) {
      (column.test(e) ? with_x : without_x) = true;
      if (with_x && without_x) break;
    }
    if (without_x) best = std::min(best, g.supporters.count());
    if (with_x) best = std::min(best, g.supporters.intersect_count(column));
  }
  return best;
}

std::size_t ACState::extend(FeatureIndex x) {
  check_candidate(x);
  const Bitset& column = data_->column(x);
  std::vector<Group> next;
  next.reserve(groups_.size() * 2);
  for (auto& g : groups_) {
    std::vector<EntityIndex> with_x;
    std::vector<EntityIndex> without_x;
    for (auto e : g.members) (column.test(e) ? with_x : without_x).push_back(e);
    if (!without_x.empty()) {
      if (with_x.empty()) {
        next.push_back(std::move(g));
        continue;
      }
      next.push_back(Group{std::move(without_x), g.supporters});
    }
    next.push_back(Group{std::move(with_x), std::move(g.supporters &= column)});
  }
  groups_ = std::move(next);
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    for (auto e : groups_[gi].members) group_of_[e] = gi;
  }
  features_ = features_.with(x);
  recompute_ac();
  return dataset_ac_;
}

ACState ACState::extended(FeatureIndex x) const {
  ACState copy = *this;
  copy.extend(x);
  return copy;
}

void ACState::recompute_ac() {
  dataset_ac_ = std::numeric_limits<std::size_t>::max();
  for (const auto& g : groups_) dataset_ac_ = std::min(dataset_ac_, g.supporters.count());
}

}  // namespace kac
