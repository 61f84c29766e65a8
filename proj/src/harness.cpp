#include "gpbo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "gpbo/csv.hpp"
#include "gpbo/errors.hpp"
#include "gpbo/evaluation.hpp"
#include "gpbo/logging.hpp"
#include "gpbo/study_io.hpp"
#include "gpbo/svg_plot.hpp"

namespace gpbo {

namespace {

// Stream tags; the instance tag depends on the repeat only.
constexpr std::uint64_t kInstanceTag = 1;
constexpr std::uint64_t kNoiseTag = 1'000'003;
constexpr std::uint64_t kStudyTag = 2'000'029;

template <typename T>
T json_get(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest field '") + key + "': " + e.what());
  }
}

}  // namespace

std::unique_ptr<Designer> make_designer(const std::string& name, const DesignerConfig& config) {
  if (name == "gp_bandit") return std::make_unique<GpBanditDesigner>(config);
  if (name == "random") return std::make_unique<RandomDesigner>();
  if (name == "quasi_random") return std::make_unique<QuasiRandomDesigner>();
  throw ConfigError("unknown algorithm '" + name + "'");
}

void RunManifest::validate() const {
  benchmark.validate();
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  if (batch < 1) throw ConfigError("batch must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (algorithms.empty()) throw ConfigError("no algorithms selected");
  for (const auto& a : algorithms)
    if (std::find(kAlgorithms.begin(), kAlgorithms.end(), a) == kAlgorithms.end())
      throw ConfigError("unknown algorithm '" + a + "'");
  if (firefly_max_evaluations && *firefly_max_evaluations < 1)
    throw ConfigError("firefly_max_evaluations must be >= 1");
}

bench::BenchmarkSpec benchmark_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("'benchmark' must be an object");
  bench::BenchmarkSpec spec;
  spec.function = json_get<std::string>(j, "function", spec.function);
  spec.dimension = json_get<int>(j, "dimension", spec.dimension);
  spec.shift = json_get<bool>(j, "shift", spec.shift);
  spec.categorize_fraction = json_get<double>(j, "categorize_fraction", spec.categorize_fraction);
  if (j.contains("noise") && !j["noise"].is_null())
    spec.noise = bench::parse_noise_model(json_get<std::string>(j, "noise", ""));
  spec.permute_categories = json_get<bool>(j, "permute_categories", spec.permute_categories);
  spec.objectives = json_get<int>(j, "objectives", bench::is_mo_benchmark(spec.function) ? 2 : 1);
  spec.normalize_metrics = json_get<bool>(j, "normalize_metrics", spec.normalize_metrics);
  spec.validate();
  return spec;
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("manifest must be a JSON object");
  if (!j.contains("benchmark")) throw ConfigError("manifest lacks 'benchmark'");
  RunManifest m;
  m.benchmark = benchmark_spec_from_json(j["benchmark"]);
  m.algorithms = json_get<std::vector<std::string>>(j, "algorithms", m.algorithms);
  m.horizon = json_get<int>(j, "horizon", m.horizon);
  m.repeats = json_get<int>(j, "repeats", m.repeats);
  m.batch = json_get<int>(j, "batch", m.batch);
  m.seed = json_get<std::uint64_t>(j, "seed", m.seed);
  m.workers = json_get<int>(j, "workers", m.workers);
  if (j.contains("firefly_max_evaluations") && !j["firefly_max_evaluations"].is_null())
    m.firefly_max_evaluations = json_get<int>(j, "firefly_max_evaluations", 0);
  m.validate();
  return m;
}

RunRecord run_single(const RunManifest& manifest, int algorithm_index, int repeat) {
  const Rng base(manifest.seed);
  Rng instance_rng = base.derive(kInstanceTag + static_cast<std::uint64_t>(repeat));
  const bench::BenchmarkInstance instance(manifest.benchmark, instance_rng);
  const std::uint64_t arm = static_cast<std::uint64_t>(algorithm_index) * 100'000 + repeat;
  Rng noise_rng = base.derive(kNoiseTag + arm);
  const std::uint64_t study_seed = base.derive(kStudyTag + arm).engine()();

  DesignerConfig config;
  if (manifest.firefly_max_evaluations) config.firefly.max_evaluations = *manifest.firefly_max_evaluations;
  const auto designer = make_designer(manifest.algorithms.at(algorithm_index), config);

  Study study(instance.problem(), study_seed);
  RunRecord record{designer->name(), manifest.benchmark.id(), repeat, {}};
  const auto& space = instance.problem().space;
  while (static_cast<int>(study.num_trials()) < manifest.horizon) {
    const int count = std::min(manifest.batch, manifest.horizon - static_cast<int>(study.num_trials()));
    const auto trials = designer->suggest(study, count);
    if (trials.empty()) throw std::runtime_error("designer returned no suggestions");
    for (const auto& trial : trials) {
      const Eigen::VectorXd clean = instance.noiseless(trial.parameters);
      const Eigen::VectorXd noisy = instance.observe(trial.parameters, noise_rng);
      TrialRecord tr;
      tr.trial_index = static_cast<int>(record.trials.size()) + 1;
      tr.param_json = parameters_to_json(trial.parameters, space).dump();
      tr.objective.assign(noisy.data(), noisy.data() + noisy.size());
      tr.noiseless.assign(clean.data(), clean.data() + clean.size());
      study.complete(trial.id, tr.objective);
      record.trials.push_back(std::move(tr));
    }
  }
  log::info("finished ", record.algorithm, " repeat ", repeat, " on ", record.benchmark);
  return record;
}

std::vector<RunRecord> run_benchmark(const RunManifest& manifest) {
  manifest.validate();
  const int n_alg = static_cast<int>(manifest.algorithms.size());
  const int jobs = n_alg * manifest.repeats;
  std::vector<RunRecord> out(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < jobs; k = next++) {
      try {
        out[k] = run_single(manifest, k / manifest.repeats, k % manifest.repeats);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int n_threads = std::min(manifest.workers, jobs);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<std::string> results_header(int num_objectives) {
  std::vector<std::string> h = {"algorithm", "benchmark", "repeat", "trial_index", "param_json"};
  for (int m = 0; m < num_objectives; ++m) h.push_back("objective_" + std::to_string(m));
  for (int m = 0; m < num_objectives; ++m) h.push_back("noiseless_" + std::to_string(m));
  h.push_back("best_so_far");
  return h;
}

std::string results_csv(const std::vector<RunRecord>& runs) {
  int m = 1;
  for (const auto& r : runs)
    if (!r.trials.empty()) m = static_cast<int>(r.trials.front().objective.size());
  std::string out = csv::format_row(results_header(m));
  for (const auto& r : runs) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& t : r.trials) {
      csv::Row row = {r.algorithm, r.benchmark, std::to_string(r.repeat), std::to_string(t.trial_index), t.param_json};
      for (double v : t.objective) row.push_back(csv::format_double(v));
      for (double v : t.noiseless) row.push_back(csv::format_double(v));
      if (m == 1) {
        best = std::max(best, t.noiseless.at(0));
        row.push_back(csv::format_double(best));
      } else {
        row.emplace_back();
      }
      out += csv::format_row(row);
    }
  }
  return out;
}

std::vector<RunRecord> parse_results_csv(const std::string& text) {
  const auto rows = csv::parse(text);
  if (rows.empty()) throw ValidationError("results file is empty");
  const auto& header = rows.front();
  const int m = (static_cast<int>(header.size()) - 6) / 2;
  if (m < 1 || header != results_header(m)) throw ValidationError("unexpected results header");
  if (rows.size() < 2) throw ValidationError("results file has no data rows");

  std::vector<RunRecord> runs;
  std::map<std::tuple<std::string, std::string, int>, std::size_t> index;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != header.size()) throw ValidationError("results row " + std::to_string(i) + " has wrong width");
    int repeat = 0, trial_index = 0;
    try {
      repeat = std::stoi(row[2]);
      trial_index = std::stoi(row[3]);
    } catch (const std::exception&) {
      throw ValidationError("results row " + std::to_string(i) + " has a malformed index");
    }
    const auto key = std::make_tuple(row[0], row[1], repeat);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, runs.size()).first;
      runs.push_back(RunRecord{row[0], row[1], repeat, {}});
    }
    TrialRecord tr;
    tr.trial_index = trial_index;
    tr.param_json = row[4];
    for (int k = 0; k < m; ++k) tr.objective.push_back(csv::parse_double(row[5 + k]));
    for (int k = 0; k < m; ++k) tr.noiseless.push_back(csv::parse_double(row[5 + m + k]));
    runs[it->second].trials.push_back(std::move(tr));
  }
  for (auto& r : runs) {
    std::sort(r.trials.begin(), r.trials.end(),
              [](const TrialRecord& a, const TrialRecord& b) { return a.trial_index < b.trial_index; });
    for (std::size_t t = 0; t < r.trials.size(); ++t)
      if (r.trials[t].trial_index != static_cast<int>(t) + 1)
        throw ValidationError("trial indices of " + r.algorithm + " repeat " + std::to_string(r.repeat) +
                              " are not contiguous from 1");
  }
  return runs;
}

EvalReport evaluate_runs(const std::vector<RunRecord>& runs, const std::string& baseline, int hv_weights,
                         std::uint64_t seed) {
  if (runs.empty()) throw ValidationError("no runs to evaluate");
  std::vector<std::string> benchmarks;
  std::vector<std::string> algorithms;
  for (const auto& r : runs) {
    if (std::find(benchmarks.begin(), benchmarks.end(), r.benchmark) == benchmarks.end())
      benchmarks.push_back(r.benchmark);
    if (std::find(algorithms.begin(), algorithms.end(), r.algorithm) == algorithms.end())
      algorithms.push_back(r.algorithm);
  }
  if (algorithms.size() < 2) throw ConfigError("evaluation needs at least two algorithms");
  if (std::find(algorithms.begin(), algorithms.end(), baseline) == algorithms.end())
    throw ConfigError("baseline algorithm '" + baseline + "' not present in results");

  EvalReport report;
  report.report_csv = csv::format_row({"benchmark", "algorithm", "baseline", "log_efficiency", "targets_used",
                                       "targets_dropped", "final_median", "final_p25", "final_p75",
                                       "baseline_final_median"});
  report.curves_csv = csv::format_row({"benchmark", "algorithm", "trial_index", "mean", "median", "p40", "p60"});

  for (const auto& bench_id : benchmarks) {
    std::vector<const RunRecord*> records;
    for (const auto& r : runs)
      if (r.benchmark == bench_id && !r.trials.empty()) records.push_back(&r);
    if (records.empty()) continue;
    std::size_t horizon = records.front()->trials.size();
    for (const auto* r : records) horizon = std::min(horizon, r->trials.size());
    const std::size_t m = records.front()->trials.front().noiseless.size();

    // Each repeat is its own shifted instance, so the hypervolume reference is
    // the worst metric over all algorithms on that repeat.
    std::map<int, Eigen::VectorXd> refs;
    if (m > 1) {
      std::map<int, std::vector<Eigen::MatrixXd>> all;
      for (const auto* r : records) {
        Eigen::MatrixXd y(horizon, m);
        for (std::size_t t = 0; t < horizon; ++t)
          for (std::size_t k = 0; k < m; ++k) y(t, k) = r->trials[t].noiseless.at(k);
        all[r->repeat].push_back(std::move(y));
      }
      for (const auto& [repeat, ys] : all) refs[repeat] = eval::worst_reference(ys);
    }

    std::map<std::string, std::vector<std::vector<double>>> curves;
    for (const auto* r : records) {
      std::vector<double> curve;
      if (m == 1) {
        std::vector<double> v;
        for (std::size_t t = 0; t < horizon; ++t) v.push_back(r->trials[t].noiseless.at(0));
        curve = eval::best_so_far(v);
      } else {
        Eigen::MatrixXd y(horizon, m);
        for (std::size_t t = 0; t < horizon; ++t)
          for (std::size_t k = 0; k < m; ++k) y(t, k) = r->trials[t].noiseless.at(k);
        Rng rng(seed);  // same weights for every curve
        curve = eval::hypervolume_curve(y, refs.at(r->repeat), hv_weights, rng);
      }
      curves[r->algorithm].push_back(std::move(curve));
    }
    if (!curves.count(baseline)) throw ConfigError("baseline '" + baseline + "' has no runs on " + bench_id);

    const auto base_mean = eval::mean_curve(curves[baseline]);
    auto finals = [](const std::vector<std::vector<double>>& cs) {
      std::vector<double> f;
      for (const auto& c : cs) f.push_back(c.back());
      return f;
    };
    const double base_final = eval::median(finals(curves[baseline]));

    std::vector<plot::BandSeries> series;
    for (const auto& alg : algorithms) {
      if (!curves.count(alg)) continue;
      const auto& cs = curves[alg];
      const auto mean = eval::mean_curve(cs);
      const auto med = eval::percentile_curve(cs, 50);
      const auto p40 = eval::percentile_curve(cs, 40);
      const auto p60 = eval::percentile_curve(cs, 60);
      for (std::size_t t = 0; t < horizon; ++t)
        report.curves_csv +=
            csv::format_row({bench_id, alg, std::to_string(t + 1), csv::format_double(mean[t]),
                             csv::format_double(med[t]), csv::format_double(p40[t]), csv::format_double(p60[t])});
      series.push_back({alg, med, p40, p60});
      if (alg == baseline) continue;
      const auto le = eval::log_efficiency(base_mean, mean);
      const auto f = finals(cs);
      report.report_csv += csv::format_row(
          {bench_id, alg, baseline, le.score ? csv::format_double(*le.score) : "undefined",
           std::to_string(le.per_target.size()), std::to_string(le.dropped), csv::format_double(eval::median(f)),
           csv::format_double(eval::percentile(f, 25)), csv::format_double(eval::percentile(f, 75)),
           csv::format_double(base_final)});
    }
    report.plots[bench_id] =
        plot::line_chart_svg(bench_id, "trials", m == 1 ? "best so far" : "hypervolume", series);
  }
  return report;
}

}  // namespace gpbo
