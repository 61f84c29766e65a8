#include "gpbo/designer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gpbo/errors.hpp"
#include "gpbo/logging.hpp"
#include "gpbo/output_warping.hpp"

namespace gpbo {

namespace {

std::vector<int> first_primes(int n) {
  std::vector<int> primes;
  for (int c = 2; static_cast<int>(primes.size()) < n; ++c) {
    bool prime = true;
    for (int p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

double radical_inverse(long index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

/// Evaluated data for one study: features of every finished trial plus the
/// per-metric objectives in maximisation form.
struct History {
  std::vector<FeatureVector> features;
  std::vector<std::vector<double>> objectives;  // [metric][trial]
  std::vector<bool> infeasible;
};

History collect_history(const Study& study) {
  const auto& problem = study.problem();
  History h;
  h.objectives.resize(problem.metrics.size());
  for (const Trial& trial : study.completed()) {
    h.features.push_back(problem.space.featurize(trial.parameters));
    bool infeasible = trial.state == TrialState::kInfeasible || !trial.measurement.has_value();
    for (std::size_t m = 0; m < problem.metrics.size() && !infeasible; ++m) {
      if (!std::isfinite((*trial.measurement)[m])) infeasible = true;
    }
    h.infeasible.push_back(infeasible);
    for (std::size_t m = 0; m < problem.metrics.size(); ++m) {
      double v = infeasible ? 0.0 : (*trial.measurement)[m];
      if (problem.metrics[m].goal == Goal::kMinimize) v = -v;
      h.objectives[m].push_back(v);
    }
  }
  return h;
}

std::vector<FeatureVector> pending_features(const Study& study) {
  std::vector<FeatureVector> out;
  for (const Trial& t : study.pending()) out.push_back(study.problem().space.featurize(t.parameters));
  return out;
}

/// Warps one metric and fits its MAP posterior.
GpPosterior fit_metric(const History& h, std::size_t metric, const DesignerConfig& config, Rng& rng) {
  const WarpedObjectives warped = warp_pipeline(h.objectives[metric], h.infeasible);
  WarpedDataset data(h.features, warped.values);
  const MapFit fit = fit_map(data, config.priors, rng, config.map_fit);
  log::debug("metric ", metric, ": MAP log joint ", fit.log_joint, ", alpha_log ", fit.hyper.alpha_log,
             ", epsilon_log ", fit.hyper.epsilon_log);
  return GpPosterior(std::move(data), fit.hyper);
}

Trial fallback_trial(Study& study, Rng& rng, const std::string& reason) {
  log::warn("falling back to a random suggestion: ", reason);
  return study.add_pending(random_parameters(study.problem().space, rng),
                           {{kSourceKey, "fallback"}, {"fallback_reason", reason}});
}

}  // namespace

void ProblemStatement::validate() const {
  if (metrics.empty()) throw ValidationError("at least one objective is required");
  std::set<std::string> names;
  for (const auto& m : metrics) {
    if (m.name.empty() || !names.insert(m.name).second) throw ValidationError("objective names must be unique and non-empty");
  }
}

Study::Study(ProblemStatement problem, std::uint64_t seed) : problem_(std::move(problem)), seed_(seed) {
  problem_.validate();
}

Trial Study::add_pending(ParameterDict parameters, std::map<std::string, std::string> metadata) {
  Trial t;
  t.id = next_id_++;
  t.parameters = std::move(parameters);
  t.state = TrialState::kPending;
  t.created_tick = ++clock_;
  t.metadata = std::move(metadata);
  pending_.push_back(t);
  return t;
}

Trial Study::take_pending(int trial_id) {
  auto it = std::find_if(pending_.begin(), pending_.end(), [&](const Trial& t) { return t.id == trial_id; });
  if (it == pending_.end()) {
    const bool done = std::any_of(completed_.begin(), completed_.end(), [&](const Trial& t) { return t.id == trial_id; });
    throw StateError(done ? "trial " + std::to_string(trial_id) + " is already completed"
                          : "unknown trial id " + std::to_string(trial_id));
  }
  Trial t = std::move(*it);
  pending_.erase(it);
  return t;
}

void Study::complete(int trial_id, std::vector<double> measurement) {
  if (static_cast<int>(measurement.size()) != problem_.num_metrics()) {
    throw ValidationError("expected " + std::to_string(problem_.num_metrics()) + " metric values, got " +
                          std::to_string(measurement.size()));
  }
  Trial t = take_pending(trial_id);
  t.measurement = std::move(measurement);
  t.state = TrialState::kCompleted;
  t.completed_tick = ++clock_;
  completed_.push_back(std::move(t));
}

void Study::mark_infeasible(int trial_id) {
  Trial t = take_pending(trial_id);
  t.measurement.reset();
  t.state = TrialState::kInfeasible;
  t.completed_tick = ++clock_;
  completed_.push_back(std::move(t));
}

bool Study::completed_since_latest_pending() const {
  long latest_completion = -1;
  for (const Trial& t : completed_) latest_completion = std::max(latest_completion, t.completed_tick);
  long latest_pending = -1;
  for (const Trial& t : pending_) latest_pending = std::max(latest_pending, t.created_tick);
  return latest_completion > latest_pending;
}

Rng Study::next_suggest_rng() { return Rng(seed_, suggest_calls_++); }

void Study::restore(std::vector<Trial> completed, std::vector<Trial> pending, std::uint64_t suggest_calls, long clock,
                    int next_id) {
  completed_ = std::move(completed);
  pending_ = std::move(pending);
  suggest_calls_ = suggest_calls;
  clock_ = clock;
  next_id_ = next_id;
}

void complete_trial(Study& study, int trial_id, const std::optional<std::vector<double>>& measurement) {
  if (measurement.has_value()) {
    study.complete(trial_id, *measurement);
  } else {
    study.mark_infeasible(trial_id);
  }
}

std::vector<double> halton_point(long index, int dim) {
  if (index < 1) throw ValidationError("Halton index starts at 1");
  const std::vector<int> primes = first_primes(dim);
  std::vector<double> out(static_cast<std::size_t>(dim));
  for (int d = 0; d < dim; ++d) out[d] = radical_inverse(index, primes[d]);
  return out;
}

ParameterDict center_point(const SearchSpace& space, Rng& rng) {
  FeatureVector x;
  x.continuous = Eigen::VectorXd::Constant(space.num_continuous(), 0.5);
  for (int j = 0; j < space.num_categorical(); ++j) x.categorical.push_back(rng.index(space.categorical(j).num_categories()));
  return space.unfeaturize(x);
}

ParameterDict halton_parameters(const SearchSpace& space, long index) {
  const std::vector<double> u = halton_point(index, space.size());
  ParameterDict out;
  for (int i = 0; i < space.size(); ++i) {
    const auto& p = space.parameters()[i];
    if (p.is_categorical()) {
      const int k = p.num_categories();
      out[p.name] = p.categories[std::min(k - 1, static_cast<int>(u[i] * k))];
    } else {
      out[p.name] = unscale_from_unit(u[i], p);
    }
  }
  return out;
}

ParameterDict random_parameters(const SearchSpace& space, Rng& rng) {
  FeatureVector x;
  x.continuous.resize(space.num_continuous());
  for (int i = 0; i < space.num_continuous(); ++i) x.continuous[i] = rng.uniform();
  for (int j = 0; j < space.num_categorical(); ++j) x.categorical.push_back(rng.index(space.categorical(j).num_categories()));
  return space.unfeaturize(x);
}

SeedingConfig SeedingConfig::defaults_for(const ProblemStatement& problem) {
  if (problem.num_metrics() > 1) return {true, 10};
  return {false, 0};
}

GpBanditDesigner::GpBanditDesigner(DesignerConfig config) : config_(std::move(config)) {
  config_.acquisition.validate();
  config_.firefly.validate();
}

std::optional<Trial> GpBanditDesigner::seed_trial(Study& study, Rng& rng) const {
  const auto& space = study.problem().space;
  const std::size_t n = study.num_trials();
  if (n == 0) return study.add_pending(center_point(space, rng), {{kSourceKey, "center"}});
  const SeedingConfig seeding = config_.seeding.value_or(SeedingConfig::defaults_for(study.problem()));
  if (seeding.use_quasi_random && n <= static_cast<std::size_t>(seeding.num_quasi_random)) {
    return study.add_pending(halton_parameters(space, static_cast<long>(n)), {{kSourceKey, "halton"}});
  }
  return std::nullopt;
}

std::vector<Trial> GpBanditDesigner::suggest(Study& study, int count) {
  if (count < 1) throw ValidationError("suggestion count must be at least 1");
  Rng rng = study.next_suggest_rng();
  if (study.problem().num_metrics() > 1) return suggest_multiobjective(study, count, rng);
  return suggest_single_objective(study, count, rng);
}

std::vector<Trial> GpBanditDesigner::suggest_single_objective(Study& study, int count, Rng& rng) {
  const auto& space = study.problem().space;
  std::vector<Trial> out;
  std::optional<GpPosterior> model;
  History history;
  bool model_failed = false;
  std::string failure;

  for (int b = 0; b < count; ++b) {
    Rng step_rng = rng.derive(static_cast<std::uint64_t>(b) + 1);
    if (auto seeded = seed_trial(study, step_rng)) {
      out.push_back(*seeded);
      continue;
    }
    if (!model && !model_failed) {
      try {
        history = collect_history(study);
        if (history.features.empty()) throw ValidationError("no completed trials");
        Rng fit_rng = rng.derive(0);
        model.emplace(fit_metric(history, 0, config_, fit_rng));
      } catch (const std::exception& e) {
        model_failed = true;
        failure = e.what();
      }
    }
    if (model_failed) {
      out.push_back(fallback_trial(study, step_rng, failure));
      continue;
    }

    try {
      const std::vector<FeatureVector> pending = pending_features(study);
      const GpPosterior with_liars = model->with_extra_variance_points(pending);
      const double tau =
          pe_threshold(*model, history.features, pending, config_.acquisition.sqrt_beta);
      const bool use_ucb = study.completed_since_latest_pending() && !step_rng.bernoulli(config_.acquisition.q_override);

      std::vector<FeatureVector> trusted = history.features;
      trusted.insert(trusted.end(), pending.begin(), pending.end());
      TrustRegion tr = make_trust_region(trusted, static_cast<long>(history.features.size()), space.size());
      tr.enabled = tr.enabled && config_.use_trust_region;

      const AcquisitionConfig& acq = config_.acquisition;
      const BatchScoreFn score = [&](const FeatureMatrix& x) {
        Eigen::VectorXd s = use_ucb ? ucb_scores(with_liars, x, acq.sqrt_beta) : pe_scores(with_liars, x, tau, acq);
        apply_trust_region(s, x, tr);
        return s;
      };

      std::vector<FeatureVector> warm_start;
      const Eigen::VectorXd& targets = model->data().targets;
      Eigen::Index incumbent = 0;
      targets.maxCoeff(&incumbent);
      warm_start.push_back(history.features[static_cast<std::size_t>(incumbent)]);

      const FireflyResult best = firefly_optimize(score, space, config_.firefly, step_rng, warm_start);
      log::debug("suggestion ", b, " via ", use_ucb ? "ucb" : "pe", ", acquisition ", best.best_score);
      out.push_back(study.add_pending(space.unfeaturize(best.best), {{kSourceKey, use_ucb ? "ucb" : "pe"}}));
    } catch (const ModelError& e) {
      out.push_back(fallback_trial(study, step_rng, e.what()));
    }
  }
  return out;
}

std::vector<Trial> GpBanditDesigner::suggest_multiobjective(Study& study, int count, Rng& rng) {
  const auto& problem = study.problem();
  const auto& space = problem.space;
  const auto num_metrics = static_cast<std::size_t>(problem.num_metrics());
  std::vector<Trial> out;
  std::vector<GpPosterior> models;
  History history;
  Eigen::MatrixXd observed;
  bool model_failed = false;
  std::string failure;

  for (int b = 0; b < count; ++b) {
    Rng step_rng = rng.derive(static_cast<std::uint64_t>(b) + 1);
    if (auto seeded = seed_trial(study, step_rng)) {
      out.push_back(*seeded);
      continue;
    }
    if (models.empty() && !model_failed) {
      try {
        history = collect_history(study);
        if (history.features.empty()) throw ValidationError("no completed trials");
        Rng fit_rng = rng.derive(0);
        observed.resize(static_cast<Eigen::Index>(history.features.size()), static_cast<Eigen::Index>(num_metrics));
        for (std::size_t m = 0; m < num_metrics; ++m) {
          models.push_back(fit_metric(history, m, config_, fit_rng));
          observed.col(static_cast<Eigen::Index>(m)) = models.back().data().targets;
        }
      } catch (const std::exception& e) {
        model_failed = true;
        failure = e.what();
      }
    }
    if (model_failed) {
      out.push_back(fallback_trial(study, step_rng, failure));
      continue;
    }

    try {
      const std::vector<FeatureVector> pending = pending_features(study);
      std::vector<GpPosterior> with_liars;
      for (const auto& m : models) with_liars.push_back(m.with_extra_variance_points(pending));

      ScalarizationSet scal;
      scal.weights = sample_scalarizations(static_cast<int>(num_metrics), config_.acquisition.num_scalarizations, step_rng);
      scal.reference_point = mo_reference_point(observed);
      const MultiObjectiveAcquisition acquisition(std::move(with_liars), scal, observed, config_.acquisition.sqrt_beta);

      std::vector<FeatureVector> trusted = history.features;
      trusted.insert(trusted.end(), pending.begin(), pending.end());
      TrustRegion tr = make_trust_region(trusted, static_cast<long>(history.features.size()), space.size());
      tr.enabled = tr.enabled && config_.use_trust_region;

      const BatchScoreFn score = [&](const FeatureMatrix& x) {
        Eigen::VectorXd s = acquisition(x);
        apply_trust_region(s, x, tr);
        return s;
      };

      Eigen::Index incumbent = 0;
      observed.rowwise().sum().maxCoeff(&incumbent);
      const std::vector<FeatureVector> warm_start{history.features[static_cast<std::size_t>(incumbent)]};
      const FireflyResult best = firefly_optimize(score, space, config_.firefly, step_rng, warm_start);
      out.push_back(study.add_pending(space.unfeaturize(best.best), {{kSourceKey, "hv_ucb"}}));
    } catch (const ModelError& e) {
      out.push_back(fallback_trial(study, step_rng, e.what()));
    }
  }
  return out;
}

std::vector<Trial> RandomDesigner::suggest(Study& study, int count) {
  Rng rng = study.next_suggest_rng();
  std::vector<Trial> out;
  for (int b = 0; b < count; ++b) {
    out.push_back(study.add_pending(random_parameters(study.problem().space, rng), {{kSourceKey, "random"}}));
  }
  return out;
}

std::vector<Trial> QuasiRandomDesigner::suggest(Study& study, int count) {
  Rng rng = study.next_suggest_rng();
  std::vector<Trial> out;
  for (int b = 0; b < count; ++b) {
    const auto n = static_cast<long>(study.num_trials());
    if (n == 0) {
      out.push_back(study.add_pending(center_point(study.problem().space, rng), {{kSourceKey, "center"}}));
    } else {
      out.push_back(study.add_pending(halton_parameters(study.problem().space, n), {{kSourceKey, "halton"}}));
    }
  }
  return out;
}

}  // namespace gpbo
