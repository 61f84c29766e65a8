#include "gpbo/gp_model.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "gpbo/box_lbfgs.hpp"
#include "gpbo/errors.hpp"
#include "gpbo/logging.hpp"

namespace gpbo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Factors K + (noise + jitter * alpha^2) I, escalating jitter until it succeeds.
bool factor_gram(const Eigen::MatrixXd& kernel, double alpha_sq, double noise, double& jitter,
                 Eigen::LLT<Eigen::MatrixXd>& chol) {
  for (double j = kInitialJitter; j <= kMaxJitter * (1.0 + 1e-9); j *= 10.0) {
    Eigen::MatrixXd m = kernel;
    m.diagonal().array() += noise + j * alpha_sq;
    chol.compute(m);
    if (chol.info() == Eigen::Success) {
      jitter = j;
      return true;
    }
  }
  return false;
}

Eigen::VectorXd inverse_lengths(const Eigen::VectorXd& lambda_log) {
  return (-lambda_log.array()).exp().matrix();
}

}  // namespace

double noise_variance(double epsilon_log) {
  return kNoiseLogIsVariance ? std::exp(epsilon_log) : std::exp(2.0 * epsilon_log);
}

Eigen::VectorXd GpHyperparameters::pack() const {
  Eigen::VectorXd flat(dim() + 2);
  flat[0] = alpha_log;
  flat.segment(1, dim()) = lambda_log;
  flat[dim() + 1] = epsilon_log;
  return flat;
}

GpHyperparameters GpHyperparameters::unpack(const Eigen::VectorXd& flat) {
  GpHyperparameters h;
  const auto d = flat.size() - 2;
  h.alpha_log = flat[0];
  h.lambda_log = flat.segment(1, d);
  h.epsilon_log = flat[d + 1];
  return h;
}

double TruncatedNormal::log_pdf(double x) const {
  if (!contains(x)) return kNegInf;
  const double sd = std::sqrt(variance);
  const boost::math::normal_distribution<double> standard;
  const double mass = boost::math::cdf(standard, (upper - mean) / sd) - boost::math::cdf(standard, (lower - mean) / sd);
  const double z = (x - mean) / sd;
  return -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi * variance) - std::log(mass);
}

bool PriorSpec::contains(const GpHyperparameters& h) const {
  if (!amplitude.contains(h.alpha_log) || !noise.contains(h.epsilon_log)) return false;
  for (Eigen::Index d = 0; d < h.lambda_log.size(); ++d) {
    if (!length_scale.contains(h.lambda_log[d])) return false;
  }
  return true;
}

GpHyperparameters PriorSpec::clamped_means(int dim) const {
  GpHyperparameters h;
  h.alpha_log = std::clamp(amplitude.mean, amplitude.lower, amplitude.upper);
  h.lambda_log = Eigen::VectorXd::Constant(dim, std::clamp(length_scale.mean, length_scale.lower, length_scale.upper));
  h.epsilon_log = std::clamp(noise.mean, noise.lower, noise.upper);
  return h;
}

Eigen::VectorXd PriorSpec::lower_bounds(int dim) const {
  Eigen::VectorXd lo(dim + 2);
  lo[0] = amplitude.lower;
  lo.segment(1, dim).setConstant(length_scale.lower);
  lo[dim + 1] = noise.lower;
  return lo;
}

Eigen::VectorXd PriorSpec::upper_bounds(int dim) const {
  Eigen::VectorXd hi(dim + 2);
  hi[0] = amplitude.upper;
  hi.segment(1, dim).setConstant(length_scale.upper);
  hi[dim + 1] = noise.upper;
  return hi;
}

FeatureMatrix::FeatureMatrix(int num_continuous, int num_categorical)
    : continuous(0, num_continuous), categorical(0, num_categorical) {}

FeatureMatrix::FeatureMatrix(const std::vector<FeatureVector>& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  const Eigen::Index dc = points.empty() ? 0 : points.front().continuous.size();
  const auto dk = points.empty() ? 0 : static_cast<Eigen::Index>(points.front().categorical.size());
  continuous.resize(n, dc);
  categorical.resize(n, dk);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = points[i];
    if (p.continuous.size() != dc || static_cast<Eigen::Index>(p.categorical.size()) != dk) {
      throw ValidationError("feature vectors have inconsistent dimensions");
    }
    continuous.row(i) = p.continuous.transpose();
    for (Eigen::Index c = 0; c < dk; ++c) categorical(i, c) = p.categorical[c];
  }
}

void FeatureMatrix::append(const FeatureMatrix& other) {
  if (other.rows() == 0) return;
  if (rows() == 0) {
    *this = other;
    return;
  }
  Eigen::MatrixXd cont(rows() + other.rows(), continuous.cols());
  cont << continuous, other.continuous;
  Eigen::MatrixXi cat(rows() + other.rows(), categorical.cols());
  cat << categorical, other.categorical;
  continuous = std::move(cont);
  categorical = std::move(cat);
}

WarpedDataset::WarpedDataset(const std::vector<FeatureVector>& points, const std::vector<double>& warped)
    : features(points), targets(Eigen::Map<const Eigen::VectorXd>(warped.data(), static_cast<Eigen::Index>(warped.size()))) {
  if (points.size() != warped.size()) throw ValidationError("feature/target count mismatch");
}

double scaled_distance_sq(const FeatureVector& a, const FeatureVector& b, const Eigen::VectorXd& lambda_log) {
  const Eigen::Index dc = a.continuous.size();
  double acc = 0.0;
  for (Eigen::Index d = 0; d < dc; ++d) {
    const double diff = a.continuous[d] - b.continuous[d];
    acc += diff * diff / std::exp(lambda_log[d]);
  }
  for (std::size_t c = 0; c < a.categorical.size(); ++c) {
    if (a.categorical[c] != b.categorical[c]) acc += 1.0 / std::exp(lambda_log[dc + static_cast<Eigen::Index>(c)]);
  }
  return 5.0 * acc;
}

double matern52_of_distance(double delta, double alpha) {
  return alpha * alpha * (1.0 + delta + delta * delta / 3.0) * std::exp(-delta);
}

double matern52(const FeatureVector& a, const FeatureVector& b, const GpHyperparameters& hyper) {
  return matern52_of_distance(std::sqrt(scaled_distance_sq(a, b, hyper.lambda_log)), hyper.amplitude());
}

Eigen::MatrixXd kernel_matrix(const FeatureMatrix& a, const FeatureMatrix& b, const GpHyperparameters& hyper) {
  const int dc = a.num_continuous();
  const int dk = a.num_categorical();
  const Eigen::VectorXd inv_lambda = inverse_lengths(hyper.lambda_log);
  const double alpha = hyper.amplitude();
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      double acc = 0.0;
      for (int d = 0; d < dc; ++d) {
        const double diff = a.continuous(i, d) - b.continuous(j, d);
        acc += diff * diff * inv_lambda[d];
      }
      for (int c = 0; c < dk; ++c) {
        if (a.categorical(i, c) != b.categorical(j, c)) acc += inv_lambda[dc + c];
      }
      k(i, j) = matern52_of_distance(std::sqrt(5.0 * acc), alpha);
    }
  }
  return k;
}

LogJoint log_joint_with_gradient(const WarpedDataset& data, const GpHyperparameters& hyper,
                                 const PriorSpec& priors) {
  const int dim = hyper.dim();
  LogJoint out;
  out.gradient = Eigen::VectorXd::Zero(dim + 2);
  if (dim != data.dim()) throw ValidationError("hyperparameter dimension does not match data");
  if (!priors.contains(hyper)) {
    out.value = kNegInf;
    return out;
  }

  double value = priors.amplitude.log_pdf(hyper.alpha_log) + priors.noise.log_pdf(hyper.epsilon_log);
  out.gradient[0] = priors.amplitude.d_log_pdf(hyper.alpha_log);
  out.gradient[dim + 1] = priors.noise.d_log_pdf(hyper.epsilon_log);
  for (int d = 0; d < dim; ++d) {
    value += priors.length_scale.log_pdf(hyper.lambda_log[d]);
    out.gradient[1 + d] = priors.length_scale.d_log_pdf(hyper.lambda_log[d]);
  }

  const Eigen::Index t = data.size();
  if (t == 0) {
    out.value = value;
    return out;
  }

  const Eigen::MatrixXd kernel = kernel_matrix(data.features, data.features, hyper);
  const double alpha_sq = std::exp(2.0 * hyper.alpha_log);
  const double noise = noise_variance(hyper.epsilon_log);
  double jitter = kInitialJitter;
  Eigen::LLT<Eigen::MatrixXd> chol;
  if (!factor_gram(kernel, alpha_sq, noise, jitter, chol)) {
    out.value = kNegInf;
    out.gradient.setZero();
    return out;
  }

  const Eigen::VectorXd weights = chol.solve(data.targets);
  const Eigen::MatrixXd L = chol.matrixL();
  const double log_det = 2.0 * L.diagonal().array().log().sum();
  value += -0.5 * data.targets.dot(weights) - 0.5 * log_det -
           0.5 * static_cast<double>(t) * std::log(2.0 * std::numbers::pi);
  out.value = value;

  // d/dtheta of the log marginal likelihood = 0.5 * sum_ij (w w^T - K^-1)_ij dK_ij.
  const Eigen::MatrixXd inner =
      weights * weights.transpose() - chol.solve(Eigen::MatrixXd::Identity(t, t));

  Eigen::MatrixXd amp_part = kernel;
  amp_part.diagonal().array() += jitter * alpha_sq;
  out.gradient[0] += 0.5 * (inner.cwiseProduct(2.0 * amp_part)).sum();

  const double d_noise = kNoiseLogIsVariance ? noise : 2.0 * noise;
  out.gradient[dim + 1] += 0.5 * inner.trace() * d_noise;

  // dK_ij / d lambda_log_d = alpha^2 e^-delta (1 + delta) * 5 c_d / (6 lambda_d),
  // where c_d is the squared difference (continuous) or mismatch indicator.
  const int dc = data.features.num_continuous();
  const Eigen::VectorXd inv_lambda = inverse_lengths(hyper.lambda_log);
  Eigen::VectorXd grad_lambda = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index j = 0; j < t; ++j) {
    for (Eigen::Index i = 0; i < t; ++i) {
      if (i == j) continue;
      double acc = 0.0;
      for (int d = 0; d < dc; ++d) {
        const double diff = data.features.continuous(i, d) - data.features.continuous(j, d);
        acc += diff * diff * inv_lambda[d];
      }
      for (int c = 0; c < data.features.num_categorical(); ++c) {
        if (data.features.categorical(i, c) != data.features.categorical(j, c)) acc += inv_lambda[dc + c];
      }
      const double delta = std::sqrt(5.0 * acc);
      const double common = inner(i, j) * alpha_sq * std::exp(-delta) * (1.0 + delta) * 5.0 / 6.0;
      for (int d = 0; d < dc; ++d) {
        const double diff = data.features.continuous(i, d) - data.features.continuous(j, d);
        grad_lambda[d] += common * diff * diff * inv_lambda[d];
      }
      for (int c = 0; c < data.features.num_categorical(); ++c) {
        if (data.features.categorical(i, c) != data.features.categorical(j, c)) {
          grad_lambda[dc + c] += common * inv_lambda[dc + c];
        }
      }
    }
  }
  out.gradient.segment(1, dim) += 0.5 * grad_lambda;
  return out;
}

double log_joint(const WarpedDataset& data, const GpHyperparameters& hyper, const PriorSpec& priors) {
  return log_joint_with_gradient(data, hyper, priors).value;
}

MapFit fit_map(const WarpedDataset& data, const PriorSpec& priors, Rng& rng, const MapFitOptions& options) {
  const int dim = data.dim();
  const Eigen::VectorXd lo = priors.lower_bounds(dim);
  const Eigen::VectorXd hi = priors.upper_bounds(dim);

  const GradientObjective negative_log_joint = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    const LogJoint lj = log_joint_with_gradient(data, GpHyperparameters::unpack(x), priors);
    grad = -lj.gradient;
    return -lj.value;
  };

  BoxLbfgsOptions opt;
  opt.max_iterations = options.max_iterations;
  opt.max_line_search_steps = options.max_line_search_steps;

  MapFit best;
  best.log_joint = kNegInf;
  for (int r = 0; r < options.restarts; ++r) {
    Eigen::VectorXd x0(dim + 2);
    for (Eigen::Index i = 0; i < x0.size(); ++i) x0[i] = rng.uniform(lo[i], hi[i]);
    Eigen::VectorXd scratch(dim + 2);
    best.initial_log_joints.push_back(-negative_log_joint(x0, scratch));
    const BoxLbfgsResult res = minimize_box_lbfgs(negative_log_joint, x0, lo, hi, opt);
    const double value = -res.value;
    if (std::isfinite(value) && value > best.log_joint) {
      best.log_joint = value;
      best.hyper = GpHyperparameters::unpack(res.x);
    }
  }
  if (!std::isfinite(best.log_joint)) {
    log::warn("MAP fit failed on every restart; using prior means");
    best.hyper = priors.clamped_means(dim);
    best.log_joint = log_joint(data, best.hyper, priors);
    best.fallback = true;
  }
  return best;
}

GpPosterior::GpPosterior(WarpedDataset data, GpHyperparameters hyper)
    : data_(std::move(data)), hyper_(std::move(hyper)) {
  if (hyper_.dim() != data_.dim()) throw ValidationError("hyperparameter dimension does not match data");
  extra_ = FeatureMatrix(data_.features.num_continuous(), data_.features.num_categorical());
  if (data_.size() == 0) return;
  const Eigen::MatrixXd kernel = kernel_matrix(data_.features, data_.features, hyper_);
  if (!factor_gram(kernel, std::exp(2.0 * hyper_.alpha_log), noise_variance(hyper_.epsilon_log), jitter_, chol_)) {
    throw ModelError("Gram matrix is not positive definite at maximum jitter");
  }
  weights_ = chol_.solve(data_.targets);
}

GpPosterior GpPosterior::with_extra_variance_points(const std::vector<FeatureVector>& extra) const {
  GpPosterior out = *this;
  out.extra_ = FeatureMatrix(data_.features.num_continuous(), data_.features.num_categorical());
  if (extra.empty()) return out;
  out.extra_ = FeatureMatrix(extra);
  out.variance_features_ = data_.features;
  out.variance_features_.append(out.extra_);
  const Eigen::MatrixXd kernel = kernel_matrix(out.variance_features_, out.variance_features_, hyper_);
  double jitter = kInitialJitter;
  if (!factor_gram(kernel, std::exp(2.0 * hyper_.alpha_log), noise_variance(hyper_.epsilon_log), jitter,
                   out.extra_chol_)) {
    throw ModelError("Gram matrix with pending points is not positive definite at maximum jitter");
  }
  return out;
}

Eigen::VectorXd GpPosterior::stddev_from(const Eigen::LLT<Eigen::MatrixXd>& chol, const Eigen::MatrixXd& cross_t) const {
  const double prior_var = std::exp(2.0 * hyper_.alpha_log);
  Eigen::VectorXd var = Eigen::VectorXd::Constant(cross_t.cols(), prior_var);
  if (cross_t.rows() > 0) {
    const Eigen::MatrixXd v = chol.matrixL().solve(cross_t);
    var -= v.colwise().squaredNorm().transpose();
  }
  return var.cwiseMax(0.0).cwiseSqrt();
}

void GpPosterior::predict(const FeatureMatrix& queries, Eigen::VectorXd& means, Eigen::VectorXd& stddevs) const {
  if (data_.size() == 0) {
    means = Eigen::VectorXd::Zero(queries.rows());
  } else {
    const Eigen::MatrixXd cross_t = kernel_matrix(data_.features, queries, hyper_);
    means = cross_t.transpose() * weights_;
    if (extra_.rows() == 0) {
      stddevs = stddev_from(chol_, cross_t);
      return;
    }
  }
  stddevs = predict_stddev(queries, true);
}

Eigen::VectorXd GpPosterior::predict_mean(const FeatureMatrix& queries) const {
  if (data_.size() == 0) return Eigen::VectorXd::Zero(queries.rows());
  return kernel_matrix(queries, data_.features, hyper_) * weights_;
}

Eigen::VectorXd GpPosterior::predict_stddev(const FeatureMatrix& queries, bool include_extra) const {
  if (include_extra && extra_.rows() > 0) {
    return stddev_from(extra_chol_, kernel_matrix(variance_features_, queries, hyper_));
  }
  if (data_.size() == 0) {
    return Eigen::VectorXd::Constant(queries.rows(), hyper_.amplitude());
  }
  return stddev_from(chol_, kernel_matrix(data_.features, queries, hyper_));
}

double GpPosterior::mean(const FeatureVector& x) const { return predict_mean(FeatureMatrix({x}))[0]; }

double GpPosterior::stddev(const FeatureVector& x, bool include_extra) const {
  return predict_stddev(FeatureMatrix({x}), include_extra)[0];
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> predict_batch(const GpPosterior& posterior,
                                                          const std::vector<FeatureVector>& queries,
                                                          const std::vector<FeatureVector>& extra) {
  const FeatureMatrix q(queries);
  if (extra.empty()) {
    Eigen::VectorXd means, stddevs;
    posterior.predict(q, means, stddevs);
    return {means, stddevs};
  }
  const GpPosterior with_liars = posterior.with_extra_variance_points(extra);
  Eigen::VectorXd means, stddevs;
  with_liars.predict(q, means, stddevs);
  return {means, stddevs};
}

}  // namespace gpbo
