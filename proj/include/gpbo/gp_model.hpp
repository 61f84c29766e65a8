#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <vector>

#include "gpbo/rng.hpp"
#include "gpbo/search_space.hpp"

namespace gpbo {

/// exp(epsilon_log) is read as the noise variance added to the Gram diagonal.
/// Flip to false to read it as a standard deviation instead.
inline constexpr bool kNoiseLogIsVariance = true;

/// Gram-diagonal jitter, as a multiple of alpha^2; escalates x10 on failure.
inline constexpr double kInitialJitter = 1e-10;
inline constexpr double kMaxJitter = 1e-4;

double noise_variance(double epsilon_log);

struct GpHyperparameters {
  double alpha_log = 0.0;
  Eigen::VectorXd lambda_log;  // continuous dims first, then one per categorical parameter
  double epsilon_log = 0.0;

  int dim() const { return static_cast<int>(lambda_log.size()); }
  double amplitude() const { return std::exp(alpha_log); }

  /// Flat layout [alpha_log, lambda_log..., epsilon_log] used by the optimizer.
  Eigen::VectorXd pack() const;
  static GpHyperparameters unpack(const Eigen::VectorXd& flat);
};

/// Normal distribution restricted to [lower, upper], parameterised by mean and variance.
struct TruncatedNormal {
  double mean;
  double variance;
  double lower;
  double upper;

  bool contains(double x) const { return x >= lower && x <= upper; }
  /// -inf outside the support.
  double log_pdf(double x) const;
  double d_log_pdf(double x) const { return -(x - mean) / variance; }
};

struct PriorSpec {
  TruncatedNormal amplitude{std::log(0.039), 50.0, -3.0, 1.0};
  TruncatedNormal length_scale{std::log(0.5), 50.0, -2.0, 1.0};
  TruncatedNormal noise{std::log(0.0039), 50.0, -10.0, 0.0};

  bool contains(const GpHyperparameters& h) const;
  /// Prior means clamped into their supports.
  GpHyperparameters clamped_means(int dim) const;
  Eigen::VectorXd lower_bounds(int dim) const;
  Eigen::VectorXd upper_bounds(int dim) const;
};

/// Row-major view of a set of feature vectors, laid out for kernel evaluation.
struct FeatureMatrix {
  Eigen::MatrixXd continuous;   // n x Dc
  Eigen::MatrixXi categorical;  // n x Dk

  FeatureMatrix() = default;
  explicit FeatureMatrix(const std::vector<FeatureVector>& points);
  FeatureMatrix(int num_continuous, int num_categorical);
  Eigen::Index rows() const { return continuous.rows(); }
  int num_continuous() const { return static_cast<int>(continuous.cols()); }
  int num_categorical() const { return static_cast<int>(categorical.cols()); }
  void append(const FeatureMatrix& other);
};

/// Preprocessed training data for one metric.
struct WarpedDataset {
  FeatureMatrix features;
  Eigen::VectorXd targets;

  WarpedDataset() = default;
  WarpedDataset(const std::vector<FeatureVector>& points, const std::vector<double>& warped);
  WarpedDataset(int num_continuous, int num_categorical) : features(num_continuous, num_categorical) {}
  Eigen::Index size() const { return targets.size(); }
  int dim() const { return features.num_continuous() + features.num_categorical(); }
};

/// 5 * sum_d diff_d^2 / lambda_d over continuous dims plus 5 * sum_c [x_c != y_c] / lambda_c.
double scaled_distance_sq(const FeatureVector& a, const FeatureVector& b, const Eigen::VectorXd& lambda_log);

/// alpha^2 (1 + delta + delta^2 / 3) exp(-delta).
double matern52_of_distance(double delta, double alpha);
double matern52(const FeatureVector& a, const FeatureVector& b, const GpHyperparameters& hyper);

/// Cross-kernel matrix (a.rows() x b.rows()).
Eigen::MatrixXd kernel_matrix(const FeatureMatrix& a, const FeatureMatrix& b, const GpHyperparameters& hyper);

struct LogJoint {
  double value = 0.0;
  Eigen::VectorXd gradient;  // packed layout; zero when value is -inf
};

/// Sum of the prior log-densities and the GP log marginal likelihood. Returns
/// -inf outside the prior supports or if the Gram matrix cannot be factored.
double log_joint(const WarpedDataset& data, const GpHyperparameters& hyper, const PriorSpec& priors);
LogJoint log_joint_with_gradient(const WarpedDataset& data, const GpHyperparameters& hyper,
                                 const PriorSpec& priors);

struct MapFit {
  GpHyperparameters hyper;
  double log_joint = 0.0;
  std::vector<double> initial_log_joints;
  bool fallback = false;  // every restart failed; prior means returned
};

struct MapFitOptions {
  int restarts = 4;
  int max_iterations = 50;
  int max_line_search_steps = 20;
};

/// MAP hyperparameters by multi-restart box L-BFGS from uniform draws over the
/// prior supports.
MapFit fit_map(const WarpedDataset& data, const PriorSpec& priors, Rng& rng, const MapFitOptions& options = {});

/// Conditioned GP. The mean path uses the training data only; the variance
/// path may additionally condition on pending points ("constant liar").
class GpPosterior {
 public:
  /// Throws ModelError if the Gram matrix is not positive definite at maximum jitter.
  GpPosterior(WarpedDataset data, GpHyperparameters hyper);

  /// Copy whose variance path also conditions on `extra` (targets irrelevant).
  GpPosterior with_extra_variance_points(const std::vector<FeatureVector>& extra) const;

  void predict(const FeatureMatrix& queries, Eigen::VectorXd& means, Eigen::VectorXd& stddevs) const;
  Eigen::VectorXd predict_mean(const FeatureMatrix& queries) const;
  /// Stddev with or without the extra variance points.
  Eigen::VectorXd predict_stddev(const FeatureMatrix& queries, bool include_extra = true) const;

  double mean(const FeatureVector& x) const;
  double stddev(const FeatureVector& x, bool include_extra = true) const;

  const WarpedDataset& data() const { return data_; }
  const GpHyperparameters& hyper() const { return hyper_; }
  double jitter() const { return jitter_; }
  Eigen::Index num_extra() const { return extra_.rows(); }

 private:
  Eigen::VectorXd stddev_from(const Eigen::LLT<Eigen::MatrixXd>& chol, const Eigen::MatrixXd& cross_t) const;

  WarpedDataset data_;
  GpHyperparameters hyper_;
  double jitter_ = kInitialJitter;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd weights_;  // (K + noise I)^-1 y
  FeatureMatrix extra_;
  FeatureMatrix variance_features_;  // training rows followed by extra rows
  Eigen::LLT<Eigen::MatrixXd> extra_chol_;  // over training + extra points
};

/// Means from the training data; stddevs additionally conditioned on `extra`.
std::pair<Eigen::VectorXd, Eigen::VectorXd> predict_batch(const GpPosterior& posterior,
                                                          const std::vector<FeatureVector>& queries,
                                                          const std::vector<FeatureVector>& extra = {});

}  // namespace gpbo
