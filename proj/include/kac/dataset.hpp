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
#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kac/bitset.hpp"

namespace kac {

using FeatureIndex = std::size_t;
using EntityIndex = std::size_t;

enum class Label : std::uint8_t { kPos, kNeg };

// Input that fails to parse or validate. line() is 1-based, 0 when the
// problem is not tied to a line.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what, std::size_t line = 0);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Sorted, duplicate-free set of feature indices.
class FeatureSet {
 public:
  FeatureSet() = default;
  // Throws std::invalid_argument unless members are strictly increasing.
  explicit FeatureSet(std::vector<FeatureIndex> members);
  FeatureSet(std::initializer_list<FeatureIndex> members);

  // Sorts; throws std::invalid_argument on duplicates.
  static FeatureSet from_unsorted(std::vector<FeatureIndex> members);
  static FeatureSet all(std::size_t d);

  std::span<const FeatureIndex> members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(FeatureIndex x) const;
  FeatureIndex operator[](std::size_t i) const { return members_[i]; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  // Copy with x added. Throws std::invalid_argument if x is already present.
  FeatureSet with(FeatureIndex x) const;
  bool is_subset_of(const FeatureSet& other) const;

  friend bool operator==(const FeatureSet&, const FeatureSet&) = default;
  friend auto operator<=>(const FeatureSet& a, const FeatureSet& b) {
    return a.members_ <=> b.members_;
  }

 private:
  std::vector<FeatureIndex> members_;
};

struct ContainmentSet {
  EntityIndex entity = 0;
  FeatureSet features;
};

// n entities x d binary features with a POS/NEG label per entity. Rows are
// packed bit vectors; the column (vertical) view is built once at
// construction so support and containment checks reduce to word-parallel
// intersections. Immutable after construction.
class BinaryDataset {
 public:
  // Throws DataError if widths disagree, names are not unique, or the
  // name count is neither 0 nor d. Empty names become "f<i>" (1-based).
  BinaryDataset(std::size_t d, std::vector<Bitset> rows, std::vector<Label> labels,
                std::vector<std::string> feature_names = {});

  std::size_t n() const { return rows_.size(); }
  std::size_t d() const { return d_; }

  const Bitset& row(EntityIndex e) const { return rows_[e]; }
  const Bitset& column(FeatureIndex x) const { return columns_[x]; }
  bool at(EntityIndex e, FeatureIndex x) const { return rows_[e].test(x); }
  Label label(EntityIndex e) const { return labels_[e]; }
  std::span<const Label> labels() const { return labels_; }

  // Entities labelled POS, as a bit vector over entities.
  const Bitset& positives() const { return positives_; }
  std::size_t pos_count() const { return positives_.count(); }
  std::size_t neg_count() const { return n() - pos_count(); }

  std::span<const std::string> feature_names() const { return names_; }
  const std::string& feature_name(FeatureIndex x) const { return names_[x]; }
  std::optional<FeatureIndex> find_feature(std::string_view name) const;

  friend bool operator==(const BinaryDataset& a, const BinaryDataset& b) {
    return a.d_ == b.d_ && a.rows_ == b.rows_ && a.labels_ == b.labels_ &&
           a.names_ == b.names_;
  }

 private:
  std::size_t d_;
  std::vector<Bitset> rows_;
  std::vector<Label> labels_;
  std::vector<std::string> names_;
  std::vector<Bitset> columns_;
  Bitset positives_;
};

enum class Format { kDenseCsv, kSparse, kAdultRaw };

// "dense-csv", "sparse", "adult". Throws std::invalid_argument otherwise.
Format parse_format(std::string_view name);
std::string_view format_name(Format format);

// Label tokens "+1"/"-1", "1"/"0", "POS"/"NEG". nullopt for anything else.
std::optional<Label> parse_label(std::string_view token);

BinaryDataset read_dense_csv(std::istream& in);
BinaryDataset read_sparse(std::istream& in);
void write_dense_csv(const BinaryDataset& data, std::ostream& out);
void write_sparse(const BinaryDataset& data, std::ostream& out);

// Binarizes the eight Adult census attributes (age, workclass, education,
// marital-status, occupation, race, sex, hours-per-week) plus income into 19
// binary columns. Accepts the UCI comma-separated layout without a header or
// a CSV with a header row naming the columns.
BinaryDataset adult_binarize(std::istream& in);

// Column names produced by adult_binarize, in column order.
std::span<const std::string_view> adult_feature_names();

BinaryDataset load(const std::filesystem::path& path, Format format);
void write(const BinaryDataset& data, std::ostream& out, Format format);

// Throws std::out_of_range on an index >= data.d().
BinaryDataset project(const BinaryDataset& data, const FeatureSet& features);

// Throws std::out_of_range on e >= data.n().
ContainmentSet containment_set(const BinaryDataset& data, EntityIndex e);

// Throws std::out_of_range if any member of features is >= d.
void check_features(const BinaryDataset& data, const FeatureSet& features);

}  // namespace kac
