#include "gpbo/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gpbo/acquisition.hpp"
#include "gpbo/errors.hpp"

namespace gpbo::eval {

std::vector<double> best_so_far(const std::vector<double>& values) {
  if (values.empty()) throw ValidationError("best_so_far needs at least one value");
  std::vector<double> out(values.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    best = std::max(best, values[i]);
    out[i] = best;
  }
  return out;
}

std::optional<int> required_budget(const std::vector<double>& mean_curve, double target) {
  for (std::size_t t = 0; t < mean_curve.size(); ++t)
    if (mean_curve[t] >= target) return static_cast<int>(t + 1);
  return std::nullopt;
}

std::optional<double> log_efficiency_for_target(const std::vector<double>& baseline_curve,
                                                const std::vector<double>& candidate_curve, double target) {
  const auto rb_base = required_budget(baseline_curve, target);
  const auto rb_cand = required_budget(candidate_curve, target);
  if (!rb_base && !rb_cand) return std::nullopt;
  if (!rb_base) return kLogEfficiencyClip;
  if (!rb_cand) return -kLogEfficiencyClip;
  const double v = std::log(static_cast<double>(*rb_base) / *rb_cand);
  return std::clamp(v, -kLogEfficiencyClip, kLogEfficiencyClip);
}

LogEfficiency log_efficiency(const std::vector<double>& baseline_curve, const std::vector<double>& candidate_curve) {
  if (baseline_curve.size() != candidate_curve.size() || baseline_curve.empty())
    throw ValidationError("log_efficiency needs two non-empty curves of equal length");
  LogEfficiency out;
  for (std::size_t t = 0; t < baseline_curve.size(); ++t) {
    const double target = 0.5 * (baseline_curve[t] + candidate_curve[t]);
    const auto s = log_efficiency_for_target(baseline_curve, candidate_curve, target);
    if (s) out.per_target.push_back(*s);
    else ++out.dropped;
  }
  if (!out.per_target.empty())
    out.score = std::clamp(median(out.per_target), -kLogEfficiencyClip, kLogEfficiencyClip);
  return out;
}

std::vector<double> mean_curve(const std::vector<std::vector<double>>& curves) {
  if (curves.empty()) throw ValidationError("mean_curve needs at least one curve");
  std::vector<double> out(curves.front().size(), 0.0);
  for (const auto& c : curves) {
    if (c.size() != out.size()) throw ValidationError("curves differ in length");
    for (std::size_t i = 0; i < c.size(); ++i) out[i] += c[i];
  }
  for (double& v : out) v /= static_cast<double>(curves.size());
  return out;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 100.0) / 100.0 * (values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - lo) * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return percentile(std::move(values), 50.0); }

std::vector<double> percentile_curve(const std::vector<std::vector<double>>& curves, double q) {
  if (curves.empty()) throw ValidationError("percentile_curve needs at least one curve");
  const std::size_t n = curves.front().size();
  std::vector<double> out(n);
  std::vector<double> column(curves.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < curves.size(); ++r) {
      if (curves[r].size() != n) throw ValidationError("curves differ in length");
      column[r] = curves[r][i];
    }
    out[i] = percentile(column, q);
  }
  return out;
}

std::vector<double> hypervolume_curve(const Eigen::MatrixXd& metrics, const Eigen::VectorXd& ref, int n_weights,
                                      Rng& rng) {
  const Eigen::Index m = metrics.cols();
  if (m < 2) throw ValidationError("hypervolume_curve needs at least two metrics");
  const Eigen::MatrixXd weights = sample_scalarizations(static_cast<int>(m), n_weights, rng);
  // Best scalarized value per weight, updated one row at a time.
  Eigen::VectorXd best = Eigen::VectorXd::Zero(n_weights);
  std::vector<double> out;
  out.reserve(metrics.rows());
  const double c = hypervolume_constant(static_cast<int>(m));
  for (Eigen::Index t = 0; t < metrics.rows(); ++t) {
    const Eigen::VectorXd y = metrics.row(t).transpose();
    for (int w = 0; w < n_weights; ++w) best[w] = std::max(best[w], hv_scalarize(y, weights.row(w).transpose(), ref));
    out.push_back(c * best.mean());
  }
  return out;
}

Eigen::VectorXd worst_reference(const std::vector<Eigen::MatrixXd>& all_metrics) {
  Eigen::VectorXd worst;
  for (const auto& mat : all_metrics) {
    if (mat.rows() == 0) continue;
    const Eigen::VectorXd col_min = mat.colwise().minCoeff().transpose();
    worst = worst.size() == 0 ? col_min : worst.cwiseMin(col_min);
  }
  if (worst.size() == 0) throw ValidationError("worst_reference needs at least one metric vector");
  return worst;
}

}  // namespace gpbo::eval
