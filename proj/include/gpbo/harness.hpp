#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gpbo/benchmarks.hpp"
#include "gpbo/designer.hpp"
#include "json.hpp"

namespace gpbo {

inline const std::vector<std::string> kAlgorithms = {"gp_bandit", "random", "quasi_random"};

/// Throws ConfigError for unknown names.
std::unique_ptr<Designer> make_designer(const std::string& name, const DesignerConfig& config = {});

struct RunManifest {
  bench::BenchmarkSpec benchmark;
  std::vector<std::string> algorithms = {"gp_bandit", "random"};
  int horizon = 100;
  int repeats = 20;
  int batch = 1;
  std::uint64_t seed = 0;
  int workers = 1;
  /// Acquisition-optimizer budget per suggestion; unset keeps the default.
  std::optional<int> firefly_max_evaluations;

  void validate() const;
};

/// Keys: benchmark {function, dimension, shift, categorize_fraction, noise,
/// permute_categories, objectives, normalize_metrics}, algorithms, horizon,
/// repeats, batch, seed, workers, firefly_max_evaluations. Throws ConfigError.
RunManifest manifest_from_json(const nlohmann::json& j);
bench::BenchmarkSpec benchmark_spec_from_json(const nlohmann::json& j);

struct TrialRecord {
  int trial_index = 0;  // 1-based
  std::string param_json;
  std::vector<double> objective;
  std::vector<double> noiseless;
};

struct RunRecord {
  std::string algorithm;
  std::string benchmark;
  int repeat = 0;
  std::vector<TrialRecord> trials;
};

/// One (algorithm, repeat) trajectory; the benchmark instance depends only on
/// (seed, repeat) so every algorithm sees the same shifted problem.
RunRecord run_single(const RunManifest& manifest, int algorithm_index, int repeat);

/// All algorithms x repeats, spread over `manifest.workers` threads, returned
/// in (algorithm, repeat) order regardless of scheduling.
std::vector<RunRecord> run_benchmark(const RunManifest& manifest);

std::vector<std::string> results_header(int num_objectives);
std::string results_csv(const std::vector<RunRecord>& runs);

/// Parses the results format back into records. Throws ValidationError.
std::vector<RunRecord> parse_results_csv(const std::string& text);

struct EvalReport {
  std::string report_csv;
  std::string curves_csv;
  /// benchmark id -> SVG document
  std::map<std::string, std::string> plots;
};

/// Log-efficiency of every algorithm against `baseline` per benchmark, with
/// median and 40-60 percentile curves. Multi-objective runs are scored by
/// hypervolume above the worst metrics of all algorithms on the same repeat. Throws ConfigError when the baseline is
/// missing or fewer than two algorithms are present.
EvalReport evaluate_runs(const std::vector<RunRecord>& runs, const std::string& baseline, int hv_weights = 10000,
                         std::uint64_t seed = 0);

}  // namespace gpbo
