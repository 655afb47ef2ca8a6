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

#include "kac/cli.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "CLI11.hpp"
#include "kac/dataset.hpp"
#include "kac/eval.hpp"
#include "kac/miner.hpp"
#include "kac/privacy.hpp"
#include "kac/selectors.hpp"

namespace kac {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string input;
  std::string format = "dense-csv";
  std::string method;
  std::optional<std::size_t> k;
  std::optional<double> epsilon;
  std::optional<std::size_t> num_features;
  std::size_t r = 20;
  std::optional<std::uint64_t> seed;
  std::string output;
  std::string trace_csv;
  std::string selection;
  std::string features;
  std::string out_format = "dense-csv";
  std::string methods;
  std::vector<std::size_t> k_list;
  std::vector<double> epsilon_list;
  std::size_t folds = 5;
  std::size_t dp_repeats = 10;
  std::size_t max_results = 0;
  std::size_t threads = 0;
  bool greedy_continue = false;
  bool json = false;
  bool strict = false;
  bool no_timing = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t seed_of(const RunConfig& cfg) {
  if (cfg.strict && !cfg.seed) throw UsageError("--strict requires an explicit --seed");
  return cfg.seed.value_or(0);
}

void emit(const RunConfig& cfg, const std::string& content, std::ostream& out) {
  if (cfg.output.empty()) {
    out << content;
  } else {
    write_file_atomic(cfg.output, content);
  }
}

FeatureSet resolve_features(const BinaryDataset& data, const RunConfig& cfg) {
  if (!cfg.selection.empty()) {
    FeatureSet s = selection_features_from_json(read_file(cfg.selection));
    check_features(data, s);
    return s;
  }
  if (cfg.features.empty()) return FeatureSet::all(data.d());
  std::vector<FeatureIndex> members;
  std::stringstream ss(cfg.features);
  std::string name;
  while (std::getline(ss, name, ',')) {
    const auto idx = data.find_feature(name);
    if (!idx) throw DataError("unknown feature '" + name + "'");
    members.push_back(*idx);
  }
  return FeatureSet::from_unsorted(std::move(members));
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int cmd_audit(const RunConfig& cfg, std::ostream& out) {
  if (cfg.k && *cfg.k < 1) throw UsageError("--k must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const BinaryDataset data = load(cfg.input, parse_format(cfg.format));
  const FeatureSet s = resolve_features(data, cfg);
  const BinaryDataset view = s.size() == data.d() ? data : project(data, s);
  const PrivacyAudit report = audit(view, cfg.k);
  emit(cfg, audit_to_json(report) + "\n", out);
  if (!cfg.output.empty() || cfg.json) {
    out << "audit n=" << data.n() << " sfc=" << s.size() << " dataset_ac=" << report.dataset_ac;
    if (report.satisfied) out << " k=" << *cfg.k << " satisfied=" << *report.satisfied;
    out << " time=" << seconds_since(start) << "s\n";
  }
  return kExitOk;
}

int cmd_mine(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.k || *cfg.k < 1) throw UsageError("mine needs --k >= 1");
  const auto start = std::chrono::steady_clock::now();
  const BinaryDataset data = load(cfg.input, parse_format(cfg.format));
  const MaximalCollection c = mine_maximal(data, *cfg.k, {cfg.max_results, cfg.threads});
  emit(cfg, cfg.json ? collection_to_json(data, c) + "\n" : collection_to_text(data, c), out);
  if (!cfg.output.empty()) {
    out << "mine k=" << *cfg.k << " maximal_sets=" << c.sets.size()
        << (c.truncated ? " truncated=true" : "") << " time=" << seconds_since(start) << "s\n";
  }
  if (c.truncated) {
    err << "warning: enumeration stopped at --max-results " << cfg.max_results
        << "; the collection is incomplete\n";
  }
  return kExitOk;
}

SelectRequest build_request(const RunConfig& cfg) {
  if (cfg.method.empty()) throw UsageError("--method is required");
  SelectRequest request;
  try {
    request.method = parse_method(cfg.method);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (is_dp_method(request.method)) {
    if (!cfg.epsilon || !(*cfg.epsilon > 0.0)) throw UsageError("DP methods need --epsilon > 0");
    if (!cfg.num_features || *cfg.num_features < 1) {
      throw UsageError("DP methods need --num-features >= 1");
    }
    request.seed = seed_of(cfg);
  } else if (request.method != Method::kFull) {
    if (!cfg.k || *cfg.k < 1) throw UsageError(cfg.method + " needs --k >= 1");
  }
  if (cfg.r < 1) throw UsageError("--r must be >= 1");
  request.k = cfg.k;
  request.epsilon = cfg.epsilon;
  request.num_features = cfg.num_features;
  request.maximal.r = cfg.r;
  request.maximal.mine = {cfg.max_results, cfg.threads};
  request.greedy.continue_after_violation = cfg.greedy_continue;
  return request;
}

void print_summary(std::ostream& out, const SelectionResult& r, double seconds) {
  out << "select method=" << method_name(r.method);
  if (r.k) out << " k=" << *r.k;
  if (r.epsilon) out << " epsilon=" << *r.epsilon;
  out << " sfc=" << r.features.size() << " ham_dist=" << r.ham_dist.str() << " dist_cnt="
      << r.dist_cnt.str() << " cm_penalty=" << r.cm_penalty << " achieved_ac=" << r.achieved_ac
      << " time=" << seconds << "s\n";
}

int cmd_select(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const SelectRequest request = build_request(cfg);
  const auto start = std::chrono::steady_clock::now();
  const BinaryDataset data = load(cfg.input, parse_format(cfg.format));
  const SelectionResult result = select(data, request);
  const std::string json = selection_to_json(data, result);
  if (cfg.output.empty()) {
    out << json;
  } else {
    write_file_atomic(cfg.output, json);
  }
  if (!cfg.trace_csv.empty()) write_file_atomic(cfg.trace_csv, trace_to_csv(data, result));
  for (const auto& w : result.warnings) err << "warning: " << w << '\n';
  if (!cfg.output.empty()) print_summary(out, result, seconds_since(start));
  return kExitOk;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.folds < 2) throw UsageError("--folds must be >= 2");
  const std::uint64_t seed = seed_of(cfg);
  const BinaryDataset data = load(cfg.input, parse_format(cfg.format));
  const FeatureSet s = resolve_features(data, cfg);
  EvalReport report = cross_validate(data, s, CvOptions{cfg.folds, seed, {}});
  report.method = cfg.method.empty() ? (cfg.selection.empty() ? "features" : "selection")
                                     : cfg.method;
  if (cfg.no_timing) report.wall_time = 0.0;
  emit(cfg, eval_report_to_json(report), out);
  if (!cfg.output.empty()) {
    out << "evaluate sfc=" << report.feature_count << " auc_mean=" << report.auc_mean
        << " auc_std=" << report.auc_std << " time=" << report.wall_time << "s\n";
  }
  return kExitOk;
}

int cmd_benchmark(const RunConfig& cfg, std::ostream& out) {
  BenchmarkConfig bc;
  if (cfg.methods.empty()) throw UsageError("--methods is required");
  std::stringstream ss(cfg.methods);
  std::string name;
  while (std::getline(ss, name, ',')) {
    try {
      bc.methods.push_back(parse_method(name));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  bool any_dp = false;
  bool any_k = false;
  for (auto m : bc.methods) {
    any_dp = any_dp || is_dp_method(m);
    any_k = any_k || (!is_dp_method(m) && m != Method::kFull);
  }
  for (auto k : cfg.k_list) {
    if (k < 1) throw UsageError("--k-list entries must be >= 1");
  }
  for (auto e : cfg.epsilon_list) {
    if (!(e > 0.0)) throw UsageError("--epsilon-list entries must be > 0");
  }
  if (any_k && cfg.k_list.empty()) throw UsageError("--k-list is required for k methods");
  if (any_dp && cfg.epsilon_list.empty()) {
    throw UsageError("--epsilon-list is required for DP methods");
  }
  if (any_dp && !cfg.num_features && cfg.k_list.empty()) {
    throw UsageError("DP methods need --num-features or --k-list");
  }
  if (cfg.folds < 2) throw UsageError("--folds must be >= 2");
  bc.k_list = cfg.k_list;
  bc.epsilon_list = cfg.epsilon_list;
  bc.num_features = cfg.num_features;
  bc.seed = seed_of(cfg);
  bc.folds = cfg.folds;
  bc.dp_repeats = std::max<std::size_t>(1, cfg.dp_repeats);
  bc.threads = cfg.threads;
  bc.maximal.r = cfg.r;
  bc.maximal.mine = {cfg.max_results, 1};
  bc.greedy.continue_after_violation = cfg.greedy_continue;

  const auto start = std::chrono::steady_clock::now();
  const BinaryDataset data = load(cfg.input, parse_format(cfg.format));
  const auto rows = benchmark(data, bc);
  emit(cfg, cfg.json ? benchmark_to_json(rows, !cfg.no_timing)
                     : benchmark_to_csv(rows, !cfg.no_timing),
       out);
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.failed ? 1 : 0;
  if (!cfg.output.empty()) {
    out << "benchmark cells=" << rows.size() << " failed=" << failed
        << " time=" << seconds_since(start) << "s\n";
  }
  return failed == 0 ? kExitOk : kExitDataError;
}

int cmd_release(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.epsilon || !(*cfg.epsilon > 0.0)) throw UsageError("release needs --epsilon > 0");
  const std::uint64_t seed = seed_of(cfg);
  const Format out_format = parse_format(cfg.out_format);
  if (out_format == Format::kAdultRaw) throw UsageError("--out-format must be dense-csv or sparse");
  const BinaryDataset data = load(cfg.input, parse_format(cfg.format));
  const FeatureSet s = resolve_features(data, cfg);
  const ReleaseResult released = dp_release(data, s, *cfg.epsilon, seed);
  for (const auto& w : released.warnings) err << "warning: " << w << '\n';
  if (!released.data) return kExitDataError;
  std::ostringstream body;
  write(*released.data, body, out_format);
  emit(cfg, body.str(), out);
  if (!cfg.output.empty()) {
    out << "release sfc=" << s.size() << " epsilon=" << *cfg.epsilon
        << " rows=" << released.data->n() << '\n';
  }
  return kExitOk;
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write '" + tmp.string() + "'");
    f << content;
    f.flush();
    if (!f) {
      std::filesystem::remove(tmp);
      throw DataError("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw DataError("cannot rename onto '" + path.string() + "': " + ec.message());
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Feature selection under k-anonymity by containment"};
  app.require_subcommand(1);

  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "Dataset file")->required();
    sub->add_option("--format", cfg.format, "dense-csv | sparse | adult")
        ->check(CLI::IsMember({"dense-csv", "sparse", "adult"}));
    sub->add_option("--output", cfg.output, "Output file (default: standard output)");
    sub->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
    sub->add_flag("--strict", cfg.strict, "Require --seed on randomized paths");
  };
  auto add_features = [&](CLI::App* sub) {
    sub->add_option("--selection", cfg.selection, "Selection JSON written by 'select'");
    sub->add_option("--features", cfg.features, "Comma-separated feature names");
  };

  auto* audit_cmd = app.add_subcommand("audit", "Containment anonymity report");
  add_input(audit_cmd);
  add_features(audit_cmd);
  audit_cmd->add_option("--k", cfg.k, "Check AC >= k");
  audit_cmd->add_flag("--json", cfg.json, "Also print a summary line");

  auto* mine_cmd = app.add_subcommand("mine", "Maximal feature sets with support >= k");
  add_input(mine_cmd);
  mine_cmd->add_option("--k", cfg.k, "Minimum support")->required();
  mine_cmd->add_option("--max-results", cfg.max_results, "Stop after this many sets (0 = all)");
  mine_cmd->add_flag("--json", cfg.json, "JSON output");

  auto* select_cmd = app.add_subcommand("select", "Privacy-constrained feature selection");
  add_input(select_cmd);
  select_cmd->add_option("--method", cfg.method, "Selection method")->required();
  select_cmd->add_option("--k", cfg.k, "Privacy parameter");
  select_cmd->add_option("--epsilon", cfg.epsilon, "DP budget");
  select_cmd->add_option("--num-features", cfg.num_features, "Feature count for DP methods");
  select_cmd->add_option("--r", cfg.r, "Maximal: candidate count");
  select_cmd->add_option("--seed", cfg.seed, "RNG seed");
  select_cmd->add_option("--trace-csv", cfg.trace_csv, "Write the decision trace as CSV");
  select_cmd->add_option("--max-results", cfg.max_results, "Maximal: mining cap (0 = none)");
  select_cmd->add_flag("--greedy-continue", cfg.greedy_continue,
                       "HamDist greedy: skip violating features instead of stopping");
  select_cmd->add_flag("--json", cfg.json, "Accepted for symmetry; output is JSON");

  auto* eval_cmd = app.add_subcommand("evaluate", "Cross-validated AUC of a feature set");
  add_input(eval_cmd);
  add_features(eval_cmd);
  eval_cmd->add_option("--folds", cfg.folds, "Fold count");
  eval_cmd->add_option("--seed", cfg.seed, "RNG seed");
  eval_cmd->add_option("--method", cfg.method, "Label for the report");
  eval_cmd->add_flag("--no-timing", cfg.no_timing, "Report zero wall time");

  auto* bench_cmd = app.add_subcommand("benchmark", "Privacy/utility sweep");
  add_input(bench_cmd);
  bench_cmd->add_option("--methods", cfg.methods, "Comma-separated methods")->required();
  bench_cmd->add_option("--k-list", cfg.k_list, "k values")->delimiter(',');
  bench_cmd->add_option("--epsilon-list", cfg.epsilon_list, "epsilon values")->delimiter(',');
  bench_cmd->add_option("--num-features", cfg.num_features, "Feature count for DP methods");
  bench_cmd->add_option("--folds", cfg.folds, "Fold count");
  bench_cmd->add_option("--dp-repeats", cfg.dp_repeats, "Runs averaged per DP cell");
  bench_cmd->add_option("--r", cfg.r, "Maximal: candidate count");
  bench_cmd->add_option("--max-results", cfg.max_results, "Maximal: mining cap (0 = none)");
  bench_cmd->add_option("--seed", cfg.seed, "RNG seed");
  bench_cmd->add_flag("--greedy-continue", cfg.greedy_continue, "See select");
  bench_cmd->add_flag("--json", cfg.json, "JSON output");
  bench_cmd->add_flag("--no-timing", cfg.no_timing, "Write 0 in the time column");

  auto* release_cmd = app.add_subcommand("release", "Differentially private synthetic release");
  add_input(release_cmd);
  add_features(release_cmd);
  release_cmd->add_option("--epsilon", cfg.epsilon, "Release budget")->required();
  release_cmd->add_option("--seed", cfg.seed, "RNG seed");
  release_cmd->add_option("--out-format", cfg.out_format, "dense-csv | sparse");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (audit_cmd->parsed()) return cmd_audit(cfg, out);
    if (mine_cmd->parsed()) return cmd_mine(cfg, out, err);
    if (select_cmd->parsed()) return cmd_select(cfg, out, err);
    if (eval_cmd->parsed()) return cmd_evaluate(cfg, out);
    if (bench_cmd->parsed()) return cmd_benchmark(cfg, out);
    if (release_cmd->parsed()) return cmd_release(cfg, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitUsage;
}

}  // namespace kac
