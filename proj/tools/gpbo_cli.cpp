#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gpbo/errors.hpp"
#include "gpbo/harness.hpp"
#include "gpbo/logging.hpp"
#include "gpbo/study_io.hpp"

namespace fs = std::filesystem;
using namespace gpbo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUser = 2;
constexpr int kExitState = 3;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Study load_state(const fs::path& path) {
  nlohmann::json j;
  try {
    j = read_json_file(path);
  } catch (const ValidationError& e) {
    throw StateError(std::string("corrupt state file: ") + e.what());
  }
  return study_from_json(j);
}

int cmd_suggest(const std::string& study_path, const std::string& state_path, int count, std::uint64_t seed) {
  if (count < 1) throw ConfigError("--count must be >= 1");
  const ProblemStatement problem = problem_from_json(read_json_file(study_path));
  Study study = fs::exists(state_path) ? load_state(state_path) : Study(problem, seed);
  if (problem_to_json(study.problem()) != problem_to_json(problem))
    throw StateError("state file belongs to a different study definition");

  const int pending = static_cast<int>(study.pending().size());
  if (pending < count) {
    GpBanditDesigner designer;
    designer.suggest(study, count - pending);
    write_file_atomic(state_path, study_to_json(study).dump(2) + "\n");
  }
  nlohmann::json out = nlohmann::json::array();
  for (int i = 0; i < count; ++i) out.push_back(trial_to_json(study.pending()[i], study.problem().space));
  std::cout << nlohmann::json{{"trials", out}}.dump(2) << "\n";
  return kExitOk;
}

int cmd_complete(const std::string& state_path, int id, const std::vector<double>& values, bool infeasible) {
  if (!fs::exists(state_path)) throw StateError("state file " + state_path + " does not exist");
  if (infeasible == !values.empty()) throw ConfigError("pass exactly one of --values or --infeasible");
  Study study = load_state(state_path);
  complete_trial(study, id, infeasible ? std::nullopt : std::optional<std::vector<double>>(values));
  write_file_atomic(state_path, study_to_json(study).dump(2) + "\n");
  return kExitOk;
}

struct BenchFlags {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> horizon, repeats, batch, workers, firefly_evals;
  std::vector<std::string> algos;
};

int cmd_bench(const BenchFlags& f) {
  nlohmann::json j = read_json_file(f.config);
  if (!j.is_object()) throw ConfigError("manifest must be a JSON object");
  if (f.seed) j["seed"] = *f.seed;
  if (f.horizon) j["horizon"] = *f.horizon;
  if (f.repeats) j["repeats"] = *f.repeats;
  if (f.batch) j["batch"] = *f.batch;
  if (f.workers) j["workers"] = *f.workers;
  if (f.firefly_evals) j["firefly_max_evaluations"] = *f.firefly_evals;
  if (!f.algos.empty()) j["algorithms"] = f.algos;
  const RunManifest manifest = manifest_from_json(j);
  const auto runs = run_benchmark(manifest);
  fs::create_directories(f.out);
  const fs::path path = fs::path(f.out) / "results.csv";
  write_file_atomic(path, results_csv(runs));
  std::cout << path.string() << "\n";
  return kExitOk;
}

int cmd_eval(const std::vector<std::string>& inputs, const std::string& baseline, const std::string& out,
             int hv_weights) {
  std::vector<RunRecord> runs;
  for (const auto& in : inputs) {
    auto part = parse_results_csv(read_text(in));
    runs.insert(runs.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  const EvalReport report = evaluate_runs(runs, baseline, hv_weights);
  fs::create_directories(out);
  write_file_atomic(fs::path(out) / "report.csv", report.report_csv);
  write_file_atomic(fs::path(out) / "curves.csv", report.curves_csv);
  for (const auto& [bench_id, svg] : report.plots) write_file_atomic(fs::path(out) / (bench_id + ".svg"), svg);
  std::cout << report.report_csv;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-process bandit optimizer: suggestions, benchmarks and evaluation"};
  app.require_subcommand(1);

  auto* suggest = app.add_subcommand("suggest", "Suggest trials for a study and record them as pending");
  std::string study_path, state_path;
  int count = 1;
  std::uint64_t study_seed = 0;
  suggest->add_option("--study", study_path, "Study definition JSON")->required();
  suggest->add_option("--state", state_path, "State file (created when missing)")->required();
  suggest->add_option("--count", count, "Number of suggestions");
  suggest->add_option("--seed", study_seed, "Seed for a new state file");

  auto* complete = app.add_subcommand("complete", "Record the outcome of a pending trial");
  int trial_id = 0;
  std::vector<double> values;
  bool infeasible = false;
  complete->add_option("--state", state_path, "State file")->required();
  complete->add_option("--id", trial_id, "Trial id")->required();
  complete->add_option("--values", values, "Metric values, one per objective")->delimiter(',');
  complete->add_flag("--infeasible", infeasible, "Mark the trial infeasible");

  auto* bench = app.add_subcommand("bench", "Run a benchmark manifest and write results.csv");
  BenchFlags bf;
  bench->add_option("--config", bf.config, "Manifest JSON")->required();
  bench->add_option("--out", bf.out, "Output directory");
  bench->add_option("--seed", bf.seed, "Override manifest seed");
  bench->add_option("--horizon", bf.horizon, "Trials per run");
  bench->add_option("--repeats", bf.repeats, "Repeats per algorithm");
  bench->add_option("--batch", bf.batch, "Suggestions per designer call");
  bench->add_option("--algo", bf.algos, "Algorithms (gp_bandit, random, quasi_random)")->delimiter(',');
  bench->add_option("--workers", bf.workers, "Worker threads");
  bench->add_option("--firefly-evals", bf.firefly_evals, "Acquisition optimizer budget per suggestion");

  auto* evaluate = app.add_subcommand("eval", "Compare algorithms in results CSV files");
  std::vector<std::string> inputs;
  std::string baseline = "random", eval_out = ".";
  int hv_weights = 10000;
  evaluate->add_option("results", inputs, "Results CSV files")->required();
  evaluate->add_option("--baseline", baseline, "Reference algorithm");
  evaluate->add_option("--out", eval_out, "Output directory");
  evaluate->add_option("--hv-weights", hv_weights, "Scalarization weights for hypervolume curves");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUser;
  }

  try {
    if (*suggest) return cmd_suggest(study_path, state_path, count, study_seed);
    if (*complete) return cmd_complete(state_path, trial_id, values, infeasible);
    if (*bench) return cmd_bench(bf);
    if (*evaluate) return cmd_eval(inputs, baseline, eval_out, hv_weights);
  } catch (const StateError& e) {
    std::cerr << "state error: " << e.what() << "\n";
    return kExitState;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUser;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUser;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
