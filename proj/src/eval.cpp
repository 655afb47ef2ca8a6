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

#include "kac/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "kac/privacy.hpp"

namespace kac {

LinearModel train_linear(const BinaryDataset& train, const TrainOptions& options) {
  if (train.pos_count() == 0 || train.neg_count() == 0) {
    throw std::invalid_argument("training data needs both classes");
  }
  const Matrix<double> x = design_matrix(train);
  const Vector<double> y = sign_labels(train);
  const double n = static_cast<double>(train.n());
  const double curvature = x.squaredNorm() / (4.0 * n) + options.lambda / n;
  const double step = 1.0 / curvature;

  LinearModel model;
  model.theta = Vector<double>::Zero(x.cols());
  for (std::size_t it = 0; it < options.iterations; ++it) {
    model.theta -= step * logistic_gradient(x, y, model.theta, options.lambda);
  }
  return model;
}

double auc(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("scores/labels size mismatch");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of midranks (1-based) of POS entries.
  double pos_rank_sum = 0.0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]] == Label::kPos) {
        pos_rank_sum += midrank;
        ++pos;
      }
    }
    i = j;
  }
  const std::size_t neg = scores.size() - pos;
  if (pos == 0 || neg == 0) throw std::invalid_argument("AUC needs both classes");
  const double p = static_cast<double>(pos);
  return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

std::vector<std::size_t> stratified_folds(const BinaryDataset& data, std::size_t folds,
                                          std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("need at least 2 folds");
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t e = 0; e < data.n(); ++e) {
    (data.label(e) == Label::kPos ? pos : neg).push_back(e);
  }
  if (pos.size() < folds || neg.size() < folds) {
    throw std::invalid_argument("class too small to stratify into " + std::to_string(folds) +
                                " folds (" + std::to_string(pos.size()) + " POS, " +
                                std::to_string(neg.size()) + " NEG)");
  }
  std::mt19937_64 rng(seed);
  // Fisher-Yates on raw engine output, independent of the library's
  // distribution implementations.
  auto shuffle = [&rng](std::vector<std::size_t>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng() % i);
      std::swap(v[i - 1], v[j]);
    }
  };
  shuffle(pos);
  shuffle(neg);
  std::vector<std::size_t> fold_of(data.n());
  std::size_t slot = 0;
  for (auto e : pos) fold_of[e] = slot++ % folds;
  for (auto e : neg) fold_of[e] = slot++ % folds;
  return fold_of;
}

namespace {

BinaryDataset subset(const BinaryDataset& data, const std::vector<std::size_t>& entities) {
  std::vector<Bitset> rows;
  std::vector<Label> labels;
  for (auto e : entities) {
    rows.push_back(data.row(e));
    labels.push_back(data.label(e));
  }
  return BinaryDataset(data.d(), std::move(rows), std::move(labels),
                       std::vector<std::string>(data.feature_names().begin(),
                                                data.feature_names().end()));
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::string format_param(double value) { return nlohmann::json(value).dump(); }

}  // namespace

EvalReport cross_validate(const BinaryDataset& data, const FeatureSet& features,
                          const CvOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const BinaryDataset projected = project(data, features);
  const auto fold_of = stratified_folds(projected, options.folds, options.seed);

  EvalReport report;
  report.feature_count = features.size();
  report.seed = options.seed;
  for (std::size_t f = 0; f < options.folds; ++f) {
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    for (std::size_t e = 0; e < projected.n(); ++e) {
      (fold_of[e] == f ? test_idx : train_idx).push_back(e);
    }
    const BinaryDataset train = subset(projected, train_idx);
    const BinaryDataset test = subset(projected, test_idx);
    const LinearModel model = train_linear(train, options.train);
    const Vector<double> scores = model.scores(test);
    report.fold_aucs.push_back(
        auc(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())),
            test.labels()));
  }
  report.auc_mean = mean(report.fold_aucs);
  report.auc_std = sample_std(report.fold_aucs);
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::uint64_t cell_seed(std::uint64_t seed, std::string_view method, std::string_view param) {
  // FNV-1a over the cell identity, mixed with the run seed (splitmix64).
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  feed(method);
  feed(param);
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL + h;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

struct Cell {
  Method method;
  std::optional<std::size_t> k;
  std::optional<double> epsilon;
  std::string param;
};

void check_constraint(const BinaryDataset& data, const SelectionResult& result) {
  if (!result.k) return;
  if (is_ac_method(result.method) && !satisfies_k_ac(data, result.features, *result.k)) {
    throw std::runtime_error("selection violates k-AC on re-audit");
  }
  if (is_kanon_method(result.method) &&
      !satisfies_k_anonymity(data, result.features, *result.k)) {
    throw std::runtime_error("selection violates k-anonymity on re-audit");
  }
}

BenchmarkRow run_cell(const BinaryDataset& data, const BenchmarkConfig& config, const Cell& cell,
                      std::size_t dp_features) {
  BenchmarkRow row;
  row.method = std::string(method_name(cell.method));
  row.param = cell.param;
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t seed = cell_seed(config.seed, row.method, row.param);
  try {
    CvOptions cv{config.folds, seed, config.train};
    if (is_dp_method(cell.method)) {
      std::vector<double> aucs;
      for (std::size_t r = 0; r < config.dp_repeats; ++r) {
        SelectRequest request;
        request.method = cell.method;
        request.epsilon = cell.epsilon;
        request.num_features = dp_features;
        request.seed = seed + 2 * r;
        const SelectionResult sel = select(data, request);
        const ReleaseResult released =
            dp_release(data, sel.features, *cell.epsilon / 2.0, seed + 2 * r + 1);
        if (!released.data) throw std::runtime_error(released.warnings.front());
        cv.seed = seed + r;
        aucs.push_back(
            cross_validate(*released.data, FeatureSet::all(released.data->d()), cv).auc_mean);
        row.sfc = sel.features.size();
      }
      row.auc_mean = mean(aucs);
      row.auc_std = sample_std(aucs);
    } else {
      SelectRequest request;
      request.method = cell.method;
      request.k = cell.k;
      request.seed = seed;
      request.maximal = config.maximal;
      request.greedy = config.greedy;
      const SelectionResult sel = select(data, request);
      check_constraint(data, sel);
      const EvalReport report = cross_validate(data, sel.features, cv);
      row.sfc = sel.features.size();
      row.auc_mean = report.auc_mean;
      row.auc_std = report.auc_std;
    }
  } catch (const std::exception& e) {
    row.failed = true;
    row.error = e.what();
  }
  row.time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

}  // namespace

std::vector<BenchmarkRow> benchmark(const BinaryDataset& data, const BenchmarkConfig& config) {
  std::vector<Cell> cells;
  bool needs_dp = false;
  for (auto m : config.methods) {
    if (m == Method::kFull) {
      cells.push_back(Cell{m, std::nullopt, std::nullopt, "-"});
    } else if (is_dp_method(m)) {
      needs_dp = true;
      for (double eps : config.epsilon_list) {
        cells.push_back(Cell{m, std::nullopt, eps, format_param(eps)});
      }
    } else {
      for (auto k : config.k_list) cells.push_back(Cell{m, k, std::nullopt, std::to_string(k)});
    }
  }

  std::size_t dp_features = 0;
  if (needs_dp) {
    if (config.num_features) {
      dp_features = *config.num_features;
    } else if (!config.k_list.empty()) {
      dp_features =
          select_greedy_hamdist(data, config.k_list.front(), config.greedy).features.size();
    } else {
      throw std::invalid_argument("DP methods need a feature count or a k list");
    }
  }

  std::vector<BenchmarkRow> rows(cells.size());
  const std::size_t workers =
      std::max<std::size_t>(1, std::min(config.threads == 0 ? std::thread::hardware_concurrency()
                                                            : config.threads,
                                        cells.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      rows[i] = run_cell(data, config, cells[i], dp_features);
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return rows;
}

std::string benchmark_to_csv(const std::vector<BenchmarkRow>& rows, bool include_time) {
  std::ostringstream out;
  out << "method,param,sfc,auc_mean,auc_std,time\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.param << ',';
    if (r.failed) {
      out << "FAILED,FAILED,FAILED,";
    } else {
      out << r.sfc << ',' << nlohmann::json(r.auc_mean).dump() << ','
          << nlohmann::json(r.auc_std).dump() << ',';
    }
    out << (include_time ? nlohmann::json(r.time).dump() : std::string("0")) << '\n';
  }
  return out.str();
}

std::string benchmark_to_json(const std::vector<BenchmarkRow>& rows, bool include_time) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json o;
    o["method"] = r.method;
    o["param"] = r.param;
    if (r.failed) {
      o["status"] = "FAILED";
      o["error"] = r.error;
    } else {
      o["status"] = "ok";
      o["sfc"] = r.sfc;
      o["auc_mean"] = r.auc_mean;
      o["auc_std"] = r.auc_std;
    }
    o["time"] = include_time ? r.time : 0.0;
    j.push_back(o);
  }
  return j.dump(2) + "\n";
}

std::string eval_report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["method"] = report.method;
  j["param"] = report.param;
  j["feature_count"] = report.feature_count;
  j["auc_mean"] = report.auc_mean;
  j["auc_std"] = report.auc_std;
  j["fold_aucs"] = report.fold_aucs;
  j["seed"] = report.seed;
  j["wall_time"] = report.wall_time;
  return j.dump(2) + "\n";
}

}  // namespace kac
