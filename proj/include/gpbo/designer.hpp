#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpbo/acquisition.hpp"
#include "gpbo/firefly.hpp"
#include "gpbo/gp_model.hpp"
#include "gpbo/search_space.hpp"

namespace gpbo {

enum class Goal { kMaximize, kMinimize };

struct MetricSpec {
  std::string name;
  Goal goal = Goal::kMaximize;
};

struct ProblemStatement {
  SearchSpace space;
  std::vector<MetricSpec> metrics;

  int num_metrics() const { return static_cast<int>(metrics.size()); }
  void validate() const;
};

/// Trials of one study plus the logical clock and random-stream counters that
/// make suggestion sequences reproducible.
class Study {
 public:
  Study() = default;
  Study(ProblemStatement problem, std::uint64_t seed);

  const ProblemStatement& problem() const { return problem_; }
  const std::vector<Trial>& completed() const { return completed_; }
  const std::vector<Trial>& pending() const { return pending_; }
  std::size_t num_trials() const { return completed_.size() + pending_.size(); }

  /// Registers a new pending trial and returns a copy of it.
  Trial add_pending(ParameterDict parameters, std::map<std::string, std::string> metadata = {});

  /// Throws StateError for unknown or already completed ids and
  /// ValidationError for a measurement with the wrong number of metrics.
  void complete(int trial_id, std::vector<double> measurement);
  void mark_infeasible(int trial_id);

  /// True when some trial completed after the newest pending trial was
  /// created. With nothing pending this reduces to "anything completed".
  bool completed_since_latest_pending() const;

  /// Random stream for the next suggest call; advances the counter.
  Rng next_suggest_rng();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t suggest_calls() const { return suggest_calls_; }
  long clock() const { return clock_; }
  int next_id() const { return next_id_; }

  /// Restores persisted bookkeeping; used by the state-file loader.
  void restore(std::vector<Trial> completed, std::vector<Trial> pending, std::uint64_t suggest_calls, long clock,
               int next_id);

 private:
  Trial take_pending(int trial_id);

  ProblemStatement problem_;
  std::vector<Trial> completed_;
  std::vector<Trial> pending_;
  std::uint64_t seed_ = 0;
  std::uint64_t suggest_calls_ = 0;
  long clock_ = 0;
  int next_id_ = 1;
};

/// Moves a pending trial to completed (or infeasible when `measurement` is empty).
void complete_trial(Study& study, int trial_id, const std::optional<std::vector<double>>& measurement);

/// Radical inverse of `index` (>= 1) in the first `dim` prime bases.
std::vector<double> halton_point(long index, int dim);

/// Non-categorical parameters at u = 0.5; categorical parameters uniform.
ParameterDict center_point(const SearchSpace& space, Rng& rng);

/// Halton point mapped into the space (categorical: floor(u * k)).
ParameterDict halton_parameters(const SearchSpace& space, long index);

ParameterDict random_parameters(const SearchSpace& space, Rng& rng);

struct SeedingConfig {
  bool use_quasi_random = false;
  int num_quasi_random = 0;

  /// Off for single-objective; 10 Halton trials for multi-objective.
  static SeedingConfig defaults_for(const ProblemStatement& problem);
};

struct DesignerConfig {
  AcquisitionConfig acquisition;
  FireflyConfig firefly;
  MapFitOptions map_fit;
  PriorSpec priors;
  std::optional<SeedingConfig> seeding;  // unset: defaults_for(problem)
  bool use_trust_region = true;
};

/// Interface shared by the GP bandit and the baselines used in benchmarks.
class Designer {
 public:
  virtual ~Designer() = default;
  /// Generates `count` suggestions, appending them to the study's pending list.
  virtual std::vector<Trial> suggest(Study& study, int count) = 0;
  virtual std::string name() const = 0;
};

/// Metadata key recording which rule produced a suggestion:
/// center | halton | ucb | pe | hv_ucb | random | fallback.
inline constexpr const char* kSourceKey = "source";

class GpBanditDesigner : public Designer {
 public:
  explicit GpBanditDesigner(DesignerConfig config = {});

  std::vector<Trial> suggest(Study& study, int count) override;
  std::string name() const override { return "gp_bandit"; }
  const DesignerConfig& config() const { return config_; }

 private:
  std::vector<Trial> suggest_single_objective(Study& study, int count, Rng& rng);
  std::vector<Trial> suggest_multiobjective(Study& study, int count, Rng& rng);
  /// Center / Halton / nothing for the next trial, based on the trial count.
  std::optional<Trial> seed_trial(Study& study, Rng& rng) const;

  DesignerConfig config_;
};

class RandomDesigner : public Designer {
 public:
  std::vector<Trial> suggest(Study& study, int count) override;
  std::string name() const override { return "random"; }
};

/// Center first, then Halton points.
class QuasiRandomDesigner : public Designer {
 public:
  std::vector<Trial> suggest(Study& study, int count) override;
  std::string name() const override { return "quasi_random"; }
};

}  // namespace gpbo
