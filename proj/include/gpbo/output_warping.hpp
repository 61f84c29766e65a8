#pragma once

#include <span>
#include <vector>

namespace gpbo {

/// Statistics recorded by each stage of the objective warping pipeline.
struct WarpMetadata {
  double scale_divisor = 1.0;  // linear scaling divisor
  double median = 0.0;         // median before linear scaling
  double half_rank_dev = 0.0;  // deviation matched by half-rank warping
  double y_min = 0.0;          // feasible range entering log warping
  double y_max = 0.0;
  double mean_shift = 0.0;     // mean subtracted in the final stage
};

struct WarpedObjectives {
  std::vector<double> values;
  std::vector<bool> infeasible_mask;
  WarpMetadata metadata;
};

/// Median with the usual even-length averaging. Input must be non-empty.
double median_of(std::span<const double> y);

/// Divide by the root-sum-square deviation of the at-or-above-median half (or
/// of all values), then shift so the median is zero. Throws ValidationError on
/// empty input.
std::vector<double> linear_scale(std::span<const double> y, WarpMetadata* meta = nullptr);

/// Replaces below-median values by median - dev * |Phi^-1(rank / t)|; values at
/// or above the median are untouched.
std::vector<double> half_rank_warp(std::span<const double> y, WarpMetadata* meta = nullptr);

/// Maps [y_min, y_max] onto [-0.5, 0.5], stretching the region near y_max.
std::vector<double> log_warp(std::span<const double> y, double s = 1.5, WarpMetadata* meta = nullptr);

/// Sets infeasible entries to y_min - (y_max - y_min) / 2 over the feasible
/// entries. Throws ValidationError if nothing is feasible.
std::vector<double> infeasible_warp(std::span<const double> y, const std::vector<bool>& infeasible_mask);

std::vector<double> mean_shift(std::span<const double> y, WarpMetadata* meta = nullptr);

/// linear_scale -> half_rank_warp -> log_warp -> infeasible_warp -> mean_shift.
/// The first three stages see feasible entries only; values at infeasible
/// positions are ignored on input.
WarpedObjectives warp_pipeline(std::span<const double> y, const std::vector<bool>& infeasible_mask);

}  // namespace gpbo
