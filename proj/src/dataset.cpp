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

#include "kac/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace kac {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view label_token(Label l) { return l == Label::kPos ? "+1" : "-1"; }

bool default_names(const BinaryDataset& data) {
  for (std::size_t j = 0; j < data.d(); ++j) {
    if (data.feature_name(j) != "f" + std::to_string(j + 1)) return false;
  }
  return true;
}

}  // namespace

DataError::DataError(const std::string& what, std::size_t line)
    : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
      line_(line) {}

FeatureSet::FeatureSet(std::vector<FeatureIndex> members) : members_(std::move(members)) {
  for (std::size_t i = 1; i < members_.size(); ++i) {
    if (members_[i - 1] >= members_[i]) {
      throw std::invalid_argument("feature set members must be strictly increasing");
    }
  }
}

FeatureSet::FeatureSet(std::initializer_list<FeatureIndex> members)
    : FeatureSet(std::vector<FeatureIndex>(members)) {}

FeatureSet FeatureSet::from_unsorted(std::vector<FeatureIndex> members) {
  std::sort(members.begin(), members.end());
  if (std::adjacent_find(members.begin(), members.end()) != members.end()) {
    throw std::invalid_argument("duplicate feature in feature set");
  }
  return FeatureSet(std::move(members));
}

FeatureSet FeatureSet::all(std::size_t d) {
  std::vector<FeatureIndex> m(d);
  for (std::size_t i = 0; i < d; ++i) m[i] = i;
  return FeatureSet(std::move(m));
}

bool FeatureSet::contains(FeatureIndex x) const {
  return std::binary_search(members_.begin(), members_.end(), x);
}

FeatureSet FeatureSet::with(FeatureIndex x) const {
  auto it = std::lower_bound(members_.begin(), members_.end(), x);
  if (it != members_.end() && *it == x) {
    throw std::invalid_argument("feature " + std::to_string(x) + " already in set");
  }
  std::vector<FeatureIndex> m = members_;
  m.insert(m.begin() + (it - members_.begin()), x);
  FeatureSet out;
  out.members_ = std::move(m);
  return out;
}

bool FeatureSet::is_subset_of(const FeatureSet& other) const {
  return std::includes(other.members_.begin(), other.members_.end(), members_.begin(),
                       members_.end());
}

BinaryDataset::BinaryDataset(std::size_t d, std::vector<Bitset> rows,
                             std::vector<Label> labels,
                             std::vector<std::string> feature_names)
    : d_(d), rows_(std::move(rows)), labels_(std::move(labels)),
      names_(std::move(feature_names)) {
  if (rows_.size() != labels_.size()) {
    throw DataError("row count " + std::to_string(rows_.size()) +
                    " does not match label count " + std::to_string(labels_.size()));
  }
  for (std::size_t e = 0; e < rows_.size(); ++e) {
    if (rows_[e].size() != d_) {
      throw DataError("row " + std::to_string(e + 1) + " has width " +
                      std::to_string(rows_[e].size()) + ", expected " + std::to_string(d_));
    }
  }
  if (names_.empty()) names_.resize(d_);
  if (names_.size() != d_) {
    throw DataError("expected " + std::to_string(d_) + " feature names, got " +
                    std::to_string(names_.size()));
  }
  std::unordered_set<std::string> seen;
  for (std::size_t j = 0; j < d_; ++j) {
    if (names_[j].empty()) names_[j] = "f" + std::to_string(j + 1);
    if (!seen.insert(names_[j]).second) {
      throw DataError("duplicate feature name '" + names_[j] + "'");
    }
  }

  columns_.assign(d_, Bitset(rows_.size()));
  positives_ = Bitset(rows_.size());
  for (std::size_t e = 0; e < rows_.size(); ++e) {
    rows_[e].for_each_set([&](std::size_t x) { columns_[x].set(e); });
    if (labels_[e] == Label::kPos) positives_.set(e);
  }
}

std::optional<FeatureIndex> BinaryDataset::find_feature(std::string_view name) const {
  for (std::size_t j = 0; j < d_; ++j) {
    if (names_[j] == name) return j;
  }
  return std::nullopt;
}

Format parse_format(std::string_view name) {
  if (name == "dense-csv") return Format::kDenseCsv;
  if (name == "sparse") return Format::kSparse;
  if (name == "adult") return Format::kAdultRaw;
  throw std::invalid_argument("unknown format '" + std::string(name) + "'");
}

std::string_view format_name(Format format) {
  switch (format) {
    case Format::kDenseCsv: return "dense-csv";
    case Format::kSparse: return "sparse";
    case Format::kAdultRaw: return "adult";
  }
  return "";
}

std::optional<Label> parse_label(std::string_view token) {
  if (token == "+1" || token == "1" || token == "POS") return Label::kPos;
  if (token == "-1" || token == "0" || token == "NEG") return Label::kNeg;
  return std::nullopt;
}

BinaryDataset read_dense_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> names;
  bool have_header = false;
  std::vector<Bitset> rows;
  std::vector<Label> labels;
  std::size_t d = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (!have_header) {
      if (cells.size() < 2 || cells.back() != "label") {
        throw DataError("header must list feature names followed by 'label'", lineno);
      }
      for (std::size_t j = 0; j + 1 < cells.size(); ++j) {
        if (cells[j].empty()) throw DataError("empty feature name", lineno);
        names.emplace_back(cells[j]);
      }
      d = names.size();
      have_header = true;
      continue;
    }
    if (cells.size() != d + 1) {
      throw DataError("expected " + std::to_string(d + 1) + " cells, got " +
                          std::to_string(cells.size()),
                      lineno);
    }
    Bitset row(d);
    for (std::size_t j = 0; j < d; ++j) {
      if (cells[j] == "1") {
        row.set(j);
      } else if (cells[j] != "0") {
        throw DataError("non-binary cell '" + std::string(cells[j]) + "' in column " +
                            std::to_string(j + 1) + " (" + names[j] + ")",
                        lineno);
      }
    }
    const auto label = parse_label(cells[d]);
    if (!label) throw DataError("unknown label '" + std::string(cells[d]) + "'", lineno);
    rows.push_back(std::move(row));
    labels.push_back(*label);
  }
  if (!have_header) throw DataError("empty file");
  if (rows.empty()) throw DataError("no entities after header");
  return BinaryDataset(d, std::move(rows), std::move(labels), std::move(names));
}

BinaryDataset read_sparse(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::size_t> d;
  std::vector<std::string> names;
  std::vector<Bitset> rows;
  std::vector<Label> labels;

  while (std::getline(in, line)) {
    ++lineno;
    const auto text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      const auto tokens = split_ws(text);
      if (tokens[0] == "#features") {
        if (d) throw DataError("duplicate #features header", lineno);
        if (tokens.size() != 2) throw DataError("expected '#features <d>'", lineno);
        d = parse_number<std::size_t>(tokens[1]);
        if (!d || *d == 0) throw DataError("invalid feature count", lineno);
      } else if (tokens[0] == "#names") {
        const auto rest = trim(text.substr(tokens[0].size()));
        for (auto n : split(rest, ',')) names.emplace_back(n);
      }
      continue;
    }
    if (!d) throw DataError("missing '#features <d>' header before data", lineno);
    const auto tokens = split_ws(text);
    const auto label = parse_label(tokens[0]);
    if (!label) throw DataError("unknown label '" + std::string(tokens[0]) + "'", lineno);
    Bitset row(*d);
    std::size_t prev = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const auto idx = parse_number<std::size_t>(tokens[t]);
      if (!idx) throw DataError("bad feature index '" + std::string(tokens[t]) + "'", lineno);
      if (*idx < 1 || *idx > *d) {
        throw DataError("feature index " + std::to_string(*idx) + " outside [1, " +
                            std::to_string(*d) + "]",
                        lineno);
      }
      if (*idx <= prev) throw DataError("feature indices must be strictly increasing", lineno);
      prev = *idx;
      row.set(*idx - 1);
    }
    rows.push_back(std::move(row));
    labels.push_back(*label);
  }
  if (!d) throw DataError("empty file");
  if (rows.empty()) throw DataError("no entities");
  return BinaryDataset(*d, std::move(rows), std::move(labels), std::move(names));
}

void write_dense_csv(const BinaryDataset& data, std::ostream& out) {
  for (std::size_t j = 0; j < data.d(); ++j) out << data.feature_name(j) << ',';
  out << "label\n";
  std::string line;
  for (std::size_t e = 0; e < data.n(); ++e) {
    line.clear();
    for (std::size_t j = 0; j < data.d(); ++j) {
      line += data.at(e, j) ? '1' : '0';
      line += ',';
    }
    line += label_token(data.label(e));
    line += '\n';
    out << line;
  }
}

void write_sparse(const BinaryDataset& data, std::ostream& out) {
  out << "#features " << data.d() << '\n';
  if (!default_names(data)) {
    out << "#names ";
    for (std::size_t j = 0; j < data.d(); ++j) {
      if (j) out << ',';
      out << data.feature_name(j);
    }
    out << '\n';
  }
  for (std::size_t e = 0; e < data.n(); ++e) {
    out << label_token(data.label(e));
    data.row(e).for_each_set([&](std::size_t x) { out << ' ' << (x + 1); });
    out << '\n';
  }
}

namespace {

// Education cut points on the 1..16 education-num scale.
constexpr std::array<int, 3> kEducationUpper = {8, 10, 12};
// Hours-per-week cut points: <=20, 21-35, 36-40, 41-50, >50.
constexpr std::array<int, 4> kHoursUpper = {20, 35, 40, 50};
// Age buckets: [0,25], (25,35], (35,45], (45,55], (55,inf).
constexpr std::array<int, 4> kAgeUpper = {25, 35, 45, 55};

constexpr std::array<std::string_view, 19> kAdultNames = {
    "age_0_25",     "age_25_35",     "age_35_45",     "age_45_55",
    "age_55_inf",   "edu_le8",       "edu_9_10",      "edu_11_12",
    "edu_ge13",     "hours_le20",    "hours_21_35",   "hours_36_40",
    "hours_41_50",  "hours_gt50",    "never_married", "race_white",
    "sex_male",     "workclass_private", "occupation_white_collar"};

const std::map<std::string, int, std::less<>>& education_years() {
  static const std::map<std::string, int, std::less<>> table = {
      {"preschool", 1},  {"1st-4th", 2},      {"5th-6th", 3},    {"7th-8th", 4},
      {"9th", 5},        {"10th", 6},         {"11th", 7},       {"12th", 8},
      {"hs-grad", 9},    {"some-college", 10}, {"assoc-voc", 11}, {"assoc-acdm", 12},
      {"bachelors", 13}, {"masters", 14},     {"prof-school", 15}, {"doctorate", 16}};
  return table;
}

// Index of the bucket (upper bounds inclusive) that holds value.
template <std::size_t N>
std::size_t bucket(int value, const std::array<int, N>& upper) {
  for (std::size_t i = 0; i < N; ++i) {
    if (value <= upper[i]) return i;
  }
  return N;
}

struct AdultColumns {
  std::size_t age, workclass, education, marital, occupation, race, sex, hours, income;
  bool education_is_num;
};

std::optional<std::size_t> find_column(const std::vector<std::string>& header,
                                       std::initializer_list<std::string_view> aliases) {
  for (auto alias : aliases) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == alias) return i;
    }
  }
  return std::nullopt;
}

int parse_int_field(std::string_view s, std::string_view what, std::size_t lineno) {
  const auto v = parse_number<int>(s);
  if (!v) throw DataError("unparseable " + std::string(what) + " '" + std::string(s) + "'", lineno);
  return *v;
}

}  // namespace

std::span<const std::string_view> adult_feature_names() { return kAdultNames; }

BinaryDataset adult_binarize(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<AdultColumns> cols;
  std::vector<Bitset> rows;
  std::vector<Label> labels;
  std::size_t width = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || trim(line).front() == '|') continue;
    const auto cells = split(line, ',');
    if (!cols) {
      if (lower(cells[0]) == "age") {
        std::vector<std::string> header;
        for (auto c : cells) header.push_back(lower(c));
        auto need = [&](std::initializer_list<std::string_view> aliases) {
          const auto idx = find_column(header, aliases);
          if (!idx) {
            throw DataError("missing attribute column '" + std::string(*aliases.begin()) + "'",
                            lineno);
          }
          return *idx;
        };
        AdultColumns c{};
        c.age = need({"age"});
        c.workclass = need({"workclass", "work-class", "work_class"});
        if (auto num = find_column(header, {"education-num", "education_num"})) {
          c.education = *num;
          c.education_is_num = true;
        } else {
          c.education = need({"education"});
          c.education_is_num = false;
        }
        c.marital = need({"marital-status", "marital_status", "marital"});
        c.occupation = need({"occupation"});
        c.race = need({"race"});
        c.sex = need({"sex", "gender"});
        c.hours = need({"hours-per-week", "hours_per_week", "hours"});
        c.income = need({"income", "class", "label"});
        cols = c;
        width = header.size();
        continue;
      }
      // UCI adult.data layout.
      cols = AdultColumns{0, 1, 4, 5, 6, 8, 9, 12, 14, true};
      width = 15;
    }
    if (cells.size() != width) {
      throw DataError("expected " + std::to_string(width) + " columns, got " +
                          std::to_string(cells.size()),
                      lineno);
    }

    Bitset row(kAdultNames.size());
    const int age = parse_int_field(cells[cols->age], "age", lineno);
    row.set(bucket(age, kAgeUpper));

    int edu = 0;
    if (cols->education_is_num) {
      edu = parse_int_field(cells[cols->education], "education-num", lineno);
    } else {
      const auto it = education_years().find(lower(cells[cols->education]));
      if (it == education_years().end()) {
        throw DataError("unknown education '" + std::string(cells[cols->education]) + "'",
                        lineno);
      }
      edu = it->second;
    }
    row.set(5 + bucket(edu, kEducationUpper));

    const int hours = parse_int_field(cells[cols->hours], "hours-per-week", lineno);
    row.set(9 + bucket(hours, kHoursUpper));

    row.set(14, lower(cells[cols->marital]) == "never-married");
    row.set(15, lower(cells[cols->race]) == "white");
    row.set(16, lower(cells[cols->sex]) == "male");
    row.set(17, lower(cells[cols->workclass]) == "private");
    const auto occ = lower(cells[cols->occupation]);
    row.set(18, occ == "exec-managerial" || occ == "prof-specialty");

    auto income = cells[cols->income];
    if (!income.empty() && income.back() == '.') income.remove_suffix(1);
    if (income == ">50K") {
      labels.push_back(Label::kPos);
    } else if (income == "<=50K") {
      labels.push_back(Label::kNeg);
    } else {
      throw DataError("unknown income label '" + std::string(cells[cols->income]) + "'", lineno);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("empty file");
  return BinaryDataset(kAdultNames.size(), std::move(rows), std::move(labels),
                       std::vector<std::string>(kAdultNames.begin(), kAdultNames.end()));
}

BinaryDataset load(const std::filesystem::path& path, Format format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    switch (format) {
      case Format::kDenseCsv: return read_dense_csv(in);
      case Format::kSparse: return read_sparse(in);
      case Format::kAdultRaw: return adult_binarize(in);
    }
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  throw std::logic_error("unhandled format");
}

void write(const BinaryDataset& data, std::ostream& out, Format format) {
  switch (format) {
    case Format::kDenseCsv: write_dense_csv(data, out); return;
    case Format::kSparse: write_sparse(data, out); return;
    case Format::kAdultRaw: break;
  }
  throw std::invalid_argument("cannot write the adult input format");
}

void check_features(const BinaryDataset& data, const FeatureSet& features) {
  if (!features.empty() && features.members().back() >= data.d()) {
    throw std::out_of_range("feature index " + std::to_string(features.members().back()) +
                            " out of range for d=" + std::to_string(data.d()));
  }
}

BinaryDataset project(const BinaryDataset& data, const FeatureSet& features) {
  check_features(data, features);
  std::vector<Bitset> rows;
  rows.reserve(data.n());
  for (std::size_t e = 0; e < data.n(); ++e) {
    Bitset row(features.size());
    for (std::size_t j = 0; j < features.size(); ++j) {
      if (data.at(e, features[j])) row.set(j);
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::string> names;
  for (auto x : features) names.push_back(data.feature_name(x));
  return BinaryDataset(features.size(), std::move(rows),
                       std::vector<Label>(data.labels().begin(), data.labels().end()),
                       std::move(names));
}

ContainmentSet containment_set(const BinaryDataset& data, EntityIndex e) {
  if (e >= data.n()) {
    throw std::out_of_range("entity " + std::to_string(e) + " out of range for n=" +
                            std::to_string(data.n()));
  }
  std::vector<FeatureIndex> members;
  data.row(e).for_each_set([&](std::size_t x) { members.push_back(x); });
  return {e, FeatureSet(std::move(members))};
}

}  // namespace kac
