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

#include "kac/miner.hpp"

#include <algorithm>
#include <future>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace kac {
namespace {

constexpr std::size_t kBruteForceMaxD = 20;

struct TailItem {
  FeatureIndex item;
  Bitset tids;
  std::size_t count;
};

// Depth-first maximal itemset search over vertical tid bit vectors.
// Subtrees whose head plus tail is already covered by an emitted set are
// skipped; candidates are confirmed maximal against every frequent item.
class MaximalSearch {
 public:
  MaximalSearch(const BinaryDataset& data, std::size_t min_support,
                const std::vector<FeatureIndex>& frequent_items, std::size_t max_results)
      : data_(data),
        min_support_(min_support),
        frequent_items_(frequent_items),
        max_results_(max_results) {}

  void run(std::vector<FeatureIndex> head, const Bitset& tids, std::vector<TailItem> tail) {
    visit(head, tids, std::move(tail));
  }

  // Expands the child of the root that starts at tail[index].
  void run_branch(const std::vector<FeatureIndex>& head, const std::vector<TailItem>& tail,
                  std::size_t index) {
    std::vector<FeatureIndex> child_head = head;
    child_head.push_back(tail[index].item);
    visit(child_head, tail[index].tids, child_tail(tail, index));
  }

  std::vector<MaximalSet> take_results() { return std::move(results_); }
  bool truncated() const { return truncated_; }

  std::vector<TailItem> child_tail(const std::vector<TailItem>& tail, std::size_t index) const {
    std::vector<TailItem> next;
    const Bitset& tids = tail[index].tids;
    for (std::size_t j = index + 1; j < tail.size(); ++j) {
      const std::size_t c = tids.intersect_count(tail[j].tids);
      if (c >= min_support_) next.push_back(TailItem{tail[j].item, tids & tail[j].tids, c});
    }
    return next;
  }

 private:
  bool stopped() const { return max_results_ != 0 && results_.size() >= max_results_; }

  void visit(std::vector<FeatureIndex>& head, const Bitset& tids, std::vector<TailItem> tail) {
    if (stopped()) {
      truncated_ = true;
      return;
    }
    const std::size_t head_count = tids.count();
    const std::size_t head_size = head.size();

    // Items present in every supporting transaction belong to every
    // maximal superset of head.
    std::vector<TailItem> rest;
    for (auto& t : tail) {
      if (t.count == head_count) {
        head.push_back(t.item);
      } else {
        rest.push_back(std::move(t));
      }
    }

    if (rest.empty()) {
      emit(head, tids);
    } else if (!covered(head, rest)) {
      Bitset all = tids;
      for (const auto& t : rest) all &= t.tids;
      if (all.count() >= min_support_) {
        const std::size_t before = head.size();
        for (const auto& t : rest) head.push_back(t.item);
        emit(head, all);
        head.resize(before);
      } else {
        for (std::size_t i = 0; i < rest.size(); ++i) {
          head.push_back(rest[i].item);
          visit(head, rest[i].tids, child_tail(rest, i));
          head.pop_back();
        }
      }
    }
    head.resize(head_size);
  }

  bool covered(const std::vector<FeatureIndex>& head, const std::vector<TailItem>& tail) const {
    Bitset candidate(data_.d());
    for (auto x : head) candidate.set(x);
    for (const auto& t : tail) candidate.set(t.item);
    for (const auto& found : found_bits_) {
      if (candidate.is_subset_of(found)) return true;
    }
    return false;
  }

  void emit(const std::vector<FeatureIndex>& items, const Bitset& tids) {
    Bitset bits(data_.d());
    for (auto x : items) bits.set(x);
    for (auto u : frequent_items_) {
      if (!bits.test(u) && tids.intersect_count(data_.column(u)) >= min_support_) return;
    }
    for (const auto& found : found_bits_) {
      if (found == bits) return;
    }
    if (stopped()) {
      truncated_ = true;
      return;
    }
    found_bits_.push_back(bits);
    results_.push_back(
        MaximalSet{FeatureSet::from_unsorted(std::vector<FeatureIndex>(items)), tids.count()});
  }

  const BinaryDataset& data_;
  std::size_t min_support_;
  const std::vector<FeatureIndex>& frequent_items_;
  std::size_t max_results_;
  std::vector<Bitset> found_bits_;
  std::vector<MaximalSet> results_;
  bool truncated_ = false;
};

void check_support(std::size_t min_support) {
  if (min_support < 1) throw std::invalid_argument("minimum support must be >= 1");
}

}  // namespace

std::vector<Transaction> transactions(const BinaryDataset& data) {
  std::vector<Transaction> out;
  out.reserve(data.n());
  for (std::size_t e = 0; e < data.n(); ++e) {
    out.push_back(Transaction{e, containment_set(data, e).features});
  }
  return out;
}

std::size_t support(const BinaryDataset& data, const FeatureSet& items) {
  check_features(data, items);
  Bitset tids(data.n(), true);
  for (auto x : items) tids &= data.column(x);
  return tids.count();
}

void sort_collection(std::vector<MaximalSet>& sets) {
  std::sort(sets.begin(), sets.end(), [](const MaximalSet& a, const MaximalSet& b) {
    if (a.items.size() != b.items.size()) return a.items.size() > b.items.size();
    return a.items < b.items;
  });
}

MaximalCollection mine_maximal(const BinaryDataset& data, std::size_t min_support,
                               const MineOptions& options) {
  check_support(min_support);
  MaximalCollection out;
  out.min_support = min_support;
  if (min_support > data.n()) return out;

  std::vector<FeatureIndex> frequent;
  for (std::size_t x = 0; x < data.d(); ++x) {
    if (data.column(x).count() >= min_support) frequent.push_back(x);
  }
  // Fail-first order: ascending support, then index.
  std::stable_sort(frequent.begin(), frequent.end(), [&](FeatureIndex a, FeatureIndex b) {
    return data.column(a).count() < data.column(b).count();
  });

  std::vector<TailItem> root_tail;
  for (auto x : frequent) root_tail.push_back(TailItem{x, data.column(x), data.column(x).count()});
  const Bitset all(data.n(), true);

  std::size_t threads = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
  threads = std::max<std::size_t>(1, std::min(threads, root_tail.size()));

  // Absorb items every transaction has, then split the remaining
  // top-level branches across workers.
  std::vector<FeatureIndex> head;
  std::vector<TailItem> branches;
  for (auto& t : root_tail) {
    if (t.count == data.n()) {
      head.push_back(t.item);
    } else {
      branches.push_back(std::move(t));
    }
  }

  if (threads <= 1 || branches.size() < 2) {
    MaximalSearch search(data, min_support, frequent, options.max_results);
    search.run(head, all, std::move(branches));
    out.sets = search.take_results();
    out.truncated = search.truncated();
  } else {
    Bitset everything = all;
    for (const auto& t : branches) everything &= t.tids;
    if (everything.count() >= min_support) {
      // Every frequent item fits in one set; no need to branch.
      MaximalSearch search(data, min_support, frequent, options.max_results);
      search.run(head, all, std::move(branches));
      out.sets = search.take_results();
      out.truncated = search.truncated();
    } else {
      std::vector<std::future<std::pair<std::vector<MaximalSet>, bool>>> jobs;
      for (std::size_t w = 0; w < threads; ++w) {
        jobs.push_back(std::async(std::launch::async, [&, w] {
          MaximalSearch search(data, min_support, frequent, options.max_results);
          for (std::size_t i = w; i < branches.size(); i += threads) {
            search.run_branch(head, branches, i);
          }
          return std::make_pair(search.take_results(), search.truncated());
        }));
      }
      for (auto& job : jobs) {
        auto [sets, truncated] = job.get();
        out.truncated = out.truncated || truncated;
        for (auto& s : sets) out.sets.push_back(std::move(s));
      }
    }
  }

  sort_collection(out.sets);
  out.sets.erase(std::unique(out.sets.begin(), out.sets.end()), out.sets.end());
  if (options.max_results != 0 && out.sets.size() > options.max_results) {
    out.sets.resize(options.max_results);
    out.truncated = true;
  }
  return out;
}

namespace {

void check_brute_force(const BinaryDataset& data) {
  if (data.d() > kBruteForceMaxD) {
    throw std::invalid_argument("brute force enumeration needs d <= 20, got " +
                                std::to_string(data.d()));
  }
}

std::size_t mask_support(const BinaryDataset& data, std::uint32_t mask) {
  std::size_t count = 0;
  for (std::size_t e = 0; e < data.n(); ++e) {
    bool contains = true;
    for (std::size_t x = 0; x < data.d() && contains; ++x) {
      if (((mask >> x) & 1U) != 0 && !data.at(e, x)) contains = false;
    }
    if (contains) ++count;
  }
  return count;
}

FeatureSet mask_to_set(std::uint32_t mask, std::size_t d) {
  std::vector<FeatureIndex> m;
  for (std::size_t x = 0; x < d; ++x) {
    if (((mask >> x) & 1U) != 0) m.push_back(x);
  }
  return FeatureSet(std::move(m));
}

}  // namespace

MaximalCollection brute_force_maximal(const BinaryDataset& data, std::size_t min_support) {
  check_support(min_support);
  check_brute_force(data);
  const std::uint32_t limit = std::uint32_t{1} << data.d();
  std::vector<std::size_t> supports(limit);
  for (std::uint32_t mask = 0; mask < limit; ++mask) supports[mask] = mask_support(data, mask);

  MaximalCollection out;
  out.min_support = min_support;
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    if (supports[mask] < min_support) continue;
    bool maximal = true;
    for (std::uint32_t super = 0; super < limit && maximal; ++super) {
      if (super != mask && (super & mask) == mask && supports[super] >= min_support) {
        maximal = false;
      }
    }
    if (maximal) out.sets.push_back(MaximalSet{mask_to_set(mask, data.d()), supports[mask]});
  }
  sort_collection(out.sets);
  return out;
}

std::vector<FeatureSet> brute_force_frequent(const BinaryDataset& data,
                                             std::size_t min_support) {
  check_support(min_support);
  check_brute_force(data);
  std::vector<FeatureSet> out;
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << data.d()); ++mask) {
    if (mask_support(data, mask) >= min_support) out.push_back(mask_to_set(mask, data.d()));
  }
  std::sort(out.begin(), out.end(), [](const FeatureSet& a, const FeatureSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

std::string collection_to_text(const BinaryDataset& data, const MaximalCollection& c) {
  std::string out;
  for (const auto& s : c.sets) {
    out += std::to_string(s.support);
    out += '\t';
    bool first = true;
    for (auto x : s.items) {
      if (!first) out += ',';
      out += data.feature_name(x);
      first = false;
    }
    out += '\n';
  }
  return out;
}

std::string collection_to_json(const BinaryDataset& data, const MaximalCollection& c) {
  nlohmann::ordered_json j;
  j["min_support"] = c.min_support;
  j["truncated"] = c.truncated;
  j["sets"] = nlohmann::ordered_json::array();
  for (const auto& s : c.sets) {
    nlohmann::ordered_json entry;
    entry["support"] = s.support;
    std::vector<std::string> names;
    for (auto x : s.items) names.push_back(data.feature_name(x));
    entry["features"] = names;
    j["sets"].push_back(entry);
  }
  return j.dump(2);
}

}  // namespace kac
