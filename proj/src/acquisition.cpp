#include "gpbo/acquisition.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "gpbo/errors.hpp"

namespace gpbo {

void AcquisitionConfig::validate() const {
  if (!(sqrt_beta > 0 && sqrt_beta_e > 0 && rho > 0 && num_scalarizations > 0)) {
    throw ConfigError("acquisition parameters must be positive");
  }
  if (!(q_override >= 0.0 && q_override < 1.0)) throw ConfigError("q_override must lie in [0, 1)");
}

TrustRadius trust_region_radius(long num_observed, int dim) {
  const double radius =
      0.2 + (0.5 - 0.2) * (1.0 / 5.0) * static_cast<double>(num_observed) / static_cast<double>(dim + 1);
  return {radius, radius <= 0.5};
}

TrustRegion make_trust_region(const std::vector<FeatureVector>& trusted, long num_observed, int dim) {
  TrustRegion tr;
  const auto [radius, enabled] = trust_region_radius(num_observed, dim);
  tr.radius = radius;
  tr.enabled = enabled;
  const Eigen::Index dc = trusted.empty() ? 0 : trusted.front().continuous.size();
  tr.trusted.resize(static_cast<Eigen::Index>(trusted.size()), dc);
  for (std::size_t i = 0; i < trusted.size(); ++i) tr.trusted.row(static_cast<Eigen::Index>(i)) = trusted[i].continuous.transpose();
  return tr;
}

double tr_distance(const FeatureVector& x, const TrustRegion& tr) {
  if (tr.trusted.rows() == 0) return std::numeric_limits<double>::infinity();
  if (tr.trusted.cols() == 0) return 0.0;
  return (tr.trusted.rowwise() - x.continuous.transpose()).cwiseAbs().rowwise().maxCoeff().minCoeff();
}

Eigen::VectorXd tr_distance(const FeatureMatrix& x, const TrustRegion& tr) {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (tr.trusted.rows() == 0) {
      out[i] = std::numeric_limits<double>::infinity();
    } else if (tr.trusted.cols() == 0) {
      out[i] = 0.0;
    } else {
      out[i] = (tr.trusted.rowwise() - x.continuous.row(i)).cwiseAbs().rowwise().maxCoeff().minCoeff();
    }
  }
  return out;
}

double apply_trust_region(double score, const FeatureVector& x, const TrustRegion& tr) {
  if (!tr.enabled) return score;
  const double dist = tr_distance(x, tr);
  return dist <= tr.radius ? score : -kTrustRegionPenalty - dist;
}

void apply_trust_region(Eigen::VectorXd& scores, const FeatureMatrix& x, const TrustRegion& tr) {
  if (!tr.enabled) return;
  const Eigen::VectorXd dist = tr_distance(x, tr);
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (dist[i] > tr.radius) scores[i] = -kTrustRegionPenalty - dist[i];
  }
}

Eigen::VectorXd ucb_scores(const GpPosterior& posterior, const FeatureMatrix& x, double sqrt_beta) {
  Eigen::VectorXd means, stddevs;
  posterior.predict(x, means, stddevs);
  return means + sqrt_beta * stddevs;
}

double ucb(const FeatureVector& x, const GpPosterior& posterior, const std::vector<FeatureVector>& pending,
           double sqrt_beta) {
  const GpPosterior with_liars = posterior.with_extra_variance_points(pending);
  return ucb_scores(with_liars, FeatureMatrix({x}), sqrt_beta)[0];
}

Eigen::VectorXd pe_scores(const GpPosterior& posterior, const FeatureMatrix& x, double tau,
                          const AcquisitionConfig& config) {
  Eigen::VectorXd means, stddevs;
  posterior.predict(x, means, stddevs);
  const Eigen::VectorXd plain_stddevs =
      posterior.num_extra() > 0 ? posterior.predict_stddev(x, false) : stddevs;
  const Eigen::VectorXd explore_ucb = means + config.sqrt_beta_e * plain_stddevs;
  return stddevs + config.rho * (explore_ucb.array() - tau).min(0.0).matrix();
}

double pe(const FeatureVector& x, const GpPosterior& posterior, const std::vector<FeatureVector>& pending,
          double tau, const AcquisitionConfig& config) {
  const GpPosterior with_liars = posterior.with_extra_variance_points(pending);
  return pe_scores(with_liars, FeatureMatrix({x}), tau, config)[0];
}

double pe_threshold(const GpPosterior& posterior, const std::vector<FeatureVector>& evaluated,
                    const std::vector<FeatureVector>& pending, double sqrt_beta) {
  std::vector<FeatureVector> candidates = evaluated;
  candidates.insert(candidates.end(), pending.begin(), pending.end());
  if (candidates.empty()) throw ValidationError("pe_threshold needs at least one evaluated or pending point");
  const FeatureMatrix x(candidates);
  const Eigen::VectorXd means = posterior.predict_mean(x);
  const Eigen::VectorXd scores = means + sqrt_beta * posterior.predict_stddev(x, false);
  Eigen::Index best = 0;
  scores.maxCoeff(&best);
  return means[best];
}

Eigen::MatrixXd sample_scalarizations(int num_metrics, int n, Rng& rng) {
  if (num_metrics < 1 || n < 1) throw ValidationError("scalarization count and metric count must be positive");
  Eigen::MatrixXd w(n, num_metrics);
  for (int i = 0; i < n; ++i) {
    double norm = 0.0;
    do {
      for (int m = 0; m < num_metrics; ++m) w(i, m) = std::abs(rng.normal());
      norm = w.row(i).norm();
    } while (norm == 0.0 || (w.row(i).array() == 0.0).any());
    w.row(i) /= norm;
  }
  return w;
}

double hv_scalarize(const Eigen::VectorXd& y, const Eigen::VectorXd& w, const Eigen::VectorXd& ref) {
  const double smallest = ((y - ref).array() / w.array()).max(0.0).minCoeff();
  return std::pow(smallest, static_cast<double>(y.size()));
}

double hypervolume_constant(int num_metrics) {
  const double m = num_metrics;
  return std::pow(std::numbers::pi, m / 2.0) / (std::pow(2.0, m) * std::tgamma(m / 2.0 + 1.0));
}

double approx_hypervolume(const Eigen::MatrixXd& points, const Eigen::VectorXd& ref, const Eigen::MatrixXd& weights) {
  if (points.rows() == 0) return 0.0;
  const auto m = static_cast<int>(ref.size());
  const double exponent = m;
  double total = 0.0;
  for (Eigen::Index k = 0; k < weights.rows(); ++k) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      double smallest = std::numeric_limits<double>::infinity();
      for (int j = 0; j < m; ++j) smallest = std::min(smallest, std::max(0.0, (points(i, j) - ref[j]) / weights(k, j)));
      best = std::max(best, smallest);
    }
    total += std::pow(best, exponent);
  }
  return hypervolume_constant(m) * total / static_cast<double>(weights.rows());
}

double approx_hypervolume(const Eigen::MatrixXd& points, const Eigen::VectorXd& ref, int n_weights, Rng& rng) {
  if (points.rows() == 0) return 0.0;
  return approx_hypervolume(points, ref, sample_scalarizations(static_cast<int>(ref.size()), n_weights, rng));
}

Eigen::VectorXd mo_reference_point(const Eigen::MatrixXd& observed) {
  if (observed.rows() == 0) throw ValidationError("reference point needs at least one observation");
  const Eigen::VectorXd worst = observed.colwise().minCoeff().transpose();
  const Eigen::VectorXd best = observed.colwise().maxCoeff().transpose();
  return worst - 0.01 * (best - worst);
}

MultiObjectiveAcquisition::MultiObjectiveAcquisition(std::vector<GpPosterior> posteriors,
                                                     ScalarizationSet scalarizations, const Eigen::MatrixXd& observed,
                                                     double sqrt_beta)
    : posteriors_(std::move(posteriors)), scal_(std::move(scalarizations)), sqrt_beta_(sqrt_beta) {
  const auto m = static_cast<Eigen::Index>(posteriors_.size());
  if (scal_.weights.cols() != m || scal_.reference_point.size() != m) {
    throw ValidationError("scalarization dimensions do not match metric count");
  }
  inv_weights_ = scal_.weights.array().inverse();
  best_per_weight_ = Eigen::VectorXd::Zero(scal_.weights.rows());
  for (Eigen::Index k = 0; k < scal_.weights.rows(); ++k) {
    for (Eigen::Index i = 0; i < observed.rows(); ++i) {
      best_per_weight_[k] = std::max(
          best_per_weight_[k],
          hv_scalarize(observed.row(i).transpose(), scal_.weights.row(k).transpose(), scal_.reference_point));
    }
  }
}

double MultiObjectiveAcquisition::score_vector(const Eigen::VectorXd& ucb_vector) const {
  const Eigen::VectorXd shifted = ucb_vector - scal_.reference_point;
  if ((shifted.array() <= 0.0).any()) return 0.0;
  const Eigen::ArrayXd smallest = (inv_weights_.rowwise() * shifted.transpose().array()).rowwise().minCoeff();
  Eigen::ArrayXd powered = smallest;
  for (Eigen::Index j = 1; j < shifted.size(); ++j) powered *= smallest;
  return (powered - best_per_weight_.array()).max(0.0).mean();
}

Eigen::VectorXd MultiObjectiveAcquisition::operator()(const FeatureMatrix& x) const {
  const auto m = static_cast<Eigen::Index>(posteriors_.size());
  Eigen::MatrixXd ucb(x.rows(), m);
  for (Eigen::Index j = 0; j < m; ++j) ucb.col(j) = ucb_scores(posteriors_[j], x, sqrt_beta_);
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out[i] = score_vector(ucb.row(i).transpose());
  return out;
}

double MultiObjectiveAcquisition::operator()(const FeatureVector& x) const {
  return (*this)(FeatureMatrix({x}))[0];
}

}  // namespace gpbo
