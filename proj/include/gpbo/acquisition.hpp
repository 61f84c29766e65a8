#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "gpbo/gp_model.hpp"
#include "gpbo/rng.hpp"

namespace gpbo {

struct AcquisitionConfig {
  double sqrt_beta = 1.8;
  double sqrt_beta_e = 0.5;
  double rho = 10.0;
  double q_override = 0.1;
  int num_scalarizations = 1000;

  void validate() const;
};

/// Penalty floor for points outside the trust region.
inline constexpr double kTrustRegionPenalty = 1e12;

/// Union of l-infinity balls (over continuous features) around trusted points.
struct TrustRegion {
  Eigen::MatrixXd trusted;  // continuous features of trusted points, one per row
  double radius = 0.2;
  bool enabled = true;
};

struct TrustRadius {
  double radius;
  bool enabled;
};

/// 0.2 + 0.3 * t / (5 (D + 1)); disabled once it exceeds 0.5.
TrustRadius trust_region_radius(long num_observed, int dim);
TrustRegion make_trust_region(const std::vector<FeatureVector>& trusted, long num_observed, int dim);

/// Smallest l-infinity distance over continuous dims; +inf for an empty region.
double tr_distance(const FeatureVector& x, const TrustRegion& tr);
Eigen::VectorXd tr_distance(const FeatureMatrix& x, const TrustRegion& tr);

/// score inside the region (or when disabled), else -1e12 - distance.
double apply_trust_region(double score, const FeatureVector& x, const TrustRegion& tr);
void apply_trust_region(Eigen::VectorXd& scores, const FeatureMatrix& x, const TrustRegion& tr);

/// mu(x | evaluated) + sqrt_beta * sigma(x | evaluated + pending).
double ucb(const FeatureVector& x, const GpPosterior& posterior, const std::vector<FeatureVector>& pending,
           double sqrt_beta);
/// Batch form; `posterior` already carries the pending points on its variance path.
Eigen::VectorXd ucb_scores(const GpPosterior& posterior, const FeatureMatrix& x, double sqrt_beta);

/// sigma(x | evaluated + pending) + rho * min(UCB(x | evaluated, sqrt_beta_e) - tau, 0).
double pe(const FeatureVector& x, const GpPosterior& posterior, const std::vector<FeatureVector>& pending,
          double tau, const AcquisitionConfig& config);
Eigen::VectorXd pe_scores(const GpPosterior& posterior, const FeatureMatrix& x, double tau,
                          const AcquisitionConfig& config);

/// Posterior mean at the evaluated-or-pending point with the highest pending-free UCB.
/// Throws ValidationError if both sets are empty.
double pe_threshold(const GpPosterior& posterior, const std::vector<FeatureVector>& evaluated,
                    const std::vector<FeatureVector>& pending, double sqrt_beta);

/// Directions drawn uniformly from the positive orthant of the unit sphere
/// (n rows, M columns).
Eigen::MatrixXd sample_scalarizations(int num_metrics, int n, Rng& rng);

struct ScalarizationSet {
  Eigen::MatrixXd weights;
  Eigen::VectorXd reference_point;
};

/// (min_m max(0, (y_m - ref_m) / w_m))^M.
double hv_scalarize(const Eigen::VectorXd& y, const Eigen::VectorXd& w, const Eigen::VectorXd& ref);

/// pi^(M/2) / (2^M Gamma(M/2 + 1)).
double hypervolume_constant(int num_metrics);

/// Scalarization estimate of the dominated hypervolume of the rows of `points`.
double approx_hypervolume(const Eigen::MatrixXd& points, const Eigen::VectorXd& ref, const Eigen::MatrixXd& weights);
double approx_hypervolume(const Eigen::MatrixXd& points, const Eigen::VectorXd& ref, int n_weights, Rng& rng);

/// y_worst - 0.01 (y_best - y_worst) per column.
Eigen::VectorXd mo_reference_point(const Eigen::MatrixXd& observed);

/// Expected hypervolume-scalarized improvement of the per-metric UCB vector
/// over the observed metric vectors.
class MultiObjectiveAcquisition {
 public:
  /// `posteriors` hold one model per metric, each with pending points on the
  /// variance path. `observed` is t x M in warped space.
  MultiObjectiveAcquisition(std::vector<GpPosterior> posteriors, ScalarizationSet scalarizations,
                            const Eigen::MatrixXd& observed, double sqrt_beta);

  Eigen::VectorXd operator()(const FeatureMatrix& x) const;
  double operator()(const FeatureVector& x) const;

  /// Score of a given UCB vector; exposed for tests.
  double score_vector(const Eigen::VectorXd& ucb_vector) const;

 private:
  std::vector<GpPosterior> posteriors_;
  ScalarizationSet scal_;
  Eigen::ArrayXXd inv_weights_;
  Eigen::VectorXd best_per_weight_;
  double sqrt_beta_;
};

}  // namespace gpbo
