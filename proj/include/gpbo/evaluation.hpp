#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "gpbo/rng.hpp"

namespace gpbo::eval {

inline constexpr double kLogEfficiencyClip = 2.0;

/// Running maximum; throws ValidationError on empty input.
std::vector<double> best_so_far(const std::vector<double>& values);

/// Smallest 1-based t with curve[t-1] >= target; nullopt stands for "never".
std::optional<int> required_budget(const std::vector<double>& mean_curve, double target);

struct LogEfficiency {
  /// Median over usable targets, clipped; unset when every target was dropped.
  std::optional<double> score;
  std::vector<double> per_target;
  int dropped = 0;
};

/// log(RB(baseline) / RB(candidate)) over targets midway between the curves.
/// Positive means the candidate needs fewer trials.
LogEfficiency log_efficiency(const std::vector<double>& baseline_curve, const std::vector<double>& candidate_curve);

/// Clipped per-target score; nullopt when neither side reaches the target.
std::optional<double> log_efficiency_for_target(const std::vector<double>& baseline_curve,
                                                const std::vector<double>& candidate_curve, double target);

/// Element-wise mean of equally long curves.
std::vector<double> mean_curve(const std::vector<std::vector<double>>& curves);
/// Element-wise percentile (q in [0, 100], linear interpolation).
std::vector<double> percentile_curve(const std::vector<std::vector<double>>& curves, double q);
double percentile(std::vector<double> values, double q);
double median(std::vector<double> values);

/// Prefix hypervolume of the rows of `metrics` (t x M) above `ref`, all
/// prefixes sharing one set of weights so the curve is non-decreasing.
std::vector<double> hypervolume_curve(const Eigen::MatrixXd& metrics, const Eigen::VectorXd& ref, int n_weights,
                                      Rng& rng);

/// Per-metric minimum over all supplied metric matrices.
Eigen::VectorXd worst_reference(const std::vector<Eigen::MatrixXd>& all_metrics);

}  // namespace gpbo::eval
