#include "gpbo/output_warping.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>

#include "gpbo/errors.hpp"

namespace gpbo {

namespace {

double root_sum_sq(std::span<const double> y, double center, bool only_at_or_above) {
  double acc = 0.0;
  for (double v : y) {
    if (only_at_or_above && v < center) continue;
    acc += (v - center) * (v - center);
  }
  return std::sqrt(acc);
}

/// 1-based ascending ranks with ties sharing their average rank.
std::vector<double> midranks(std::span<const double> y) {
  const std::size_t n = y.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && y[order[j + 1]] == y[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double median_of(std::span<const double> y) {
  if (y.empty()) throw ValidationError("median of empty input");
  std::vector<double> s(y.begin(), y.end());
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  return n % 2 == 1 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

std::vector<double> linear_scale(std::span<const double> y, WarpMetadata* meta) {
  if (y.empty()) throw ValidationError("linear_scale requires at least one value");
  const double med = median_of(y);
  double divisor = root_sum_sq(y, med, true);
  if (divisor == 0.0) divisor = root_sum_sq(y, med, false);
  if (divisor == 0.0) divisor = 1.0;
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] / divisor;
  const double shift = median_of(out);
  for (double& v : out) v -= shift;
  if (meta != nullptr) {
    meta->scale_divisor = divisor;
    meta->median = med;
  }
  return out;
}

std::vector<double> half_rank_warp(std::span<const double> y, WarpMetadata* meta) {
  std::vector<double> out(y.begin(), y.end());
  if (y.empty()) return out;
  const double med = median_of(y);
  const auto t = static_cast<double>(y.size());
  const double good_count =
      static_cast<double>(std::count_if(y.begin(), y.end(), [&](double v) { return v >= med; }));
  double dev = root_sum_sq(y, med, true) / std::sqrt(good_count);
  if (dev == 0.0) dev = root_sum_sq(y, med, false) / std::sqrt(t);
  if (meta != nullptr) meta->half_rank_dev = dev;
  if (dev == 0.0) return out;

  const boost::math::normal_distribution<double> standard;
  const std::vector<double> rank = midranks(y);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] >= med) continue;
    const double q = rank[i] / t;
    out[i] = med - dev * std::abs(boost::math::quantile(standard, q));
  }
  return out;
}

std::vector<double> log_warp(std::span<const double> y, double s, WarpMetadata* meta) {
  std::vector<double> out(y.begin(), y.end());
  if (y.empty()) return out;
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  const double y_min = *lo;
  const double y_max = *hi;
  if (meta != nullptr) {
    meta->y_min = y_min;
    meta->y_max = y_max;
  }
  if (!(y_max > y_min)) return out;
  const double log_s = std::log(s);
  for (double& v : out) {
    const double normalized = (y_max - v) / (y_max - y_min);
    v = 0.5 - std::log1p(normalized * (s - 1.0)) / log_s;
  }
  return out;
}

std::vector<double> infeasible_warp(std::span<const double> y, const std::vector<bool>& infeasible_mask) {
  if (infeasible_mask.size() != y.size()) throw ValidationError("infeasible mask length mismatch");
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (infeasible_mask[i]) continue;
    y_min = std::min(y_min, y[i]);
    y_max = std::max(y_max, y[i]);
  }
  if (!std::isfinite(y_min)) throw ValidationError("all objectives are infeasible");
  std::vector<double> out(y.begin(), y.end());
  const double replacement = y_min - 0.5 * (y_max - y_min);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (infeasible_mask[i]) out[i] = replacement;
  }
  return out;
}

std::vector<double> mean_shift(std::span<const double> y, WarpMetadata* meta) {
  std::vector<double> out(y.begin(), y.end());
  if (y.empty()) return out;
  // Two-pass mean keeps the residual mean at rounding level.
  double mean = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(out.size());
  for (double& v : out) v -= mean;
  const double residual = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(out.size());
  for (double& v : out) v -= residual;
  if (meta != nullptr) meta->mean_shift = mean + residual;
  return out;
}

WarpedObjectives warp_pipeline(std::span<const double> y, const std::vector<bool>& infeasible_mask) {
  if (y.empty()) throw ValidationError("warp_pipeline requires at least one value");
  if (infeasible_mask.size() != y.size()) throw ValidationError("infeasible mask length mismatch");
  std::vector<double> feasible;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (infeasible_mask[i]) continue;
    if (!std::isfinite(y[i])) throw ValidationError("feasible objectives must be finite");
    feasible.push_back(y[i]);
  }
  if (feasible.empty()) throw ValidationError("all objectives are infeasible");

  WarpedObjectives result;
  result.infeasible_mask = infeasible_mask;
  feasible = linear_scale(feasible, &result.metadata);
  feasible = half_rank_warp(feasible, &result.metadata);
  feasible = log_warp(feasible, 1.5, &result.metadata);

  std::vector<double> full(y.size(), 0.0);
  for (std::size_t i = 0, k = 0; i < y.size(); ++i) {
    if (!infeasible_mask[i]) full[i] = feasible[k++];
  }
  full = infeasible_warp(full, infeasible_mask);
  result.values = mean_shift(full, &result.metadata);
  return result;
}

}  // namespace gpbo
