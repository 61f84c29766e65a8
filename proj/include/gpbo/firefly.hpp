#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "gpbo/gp_model.hpp"
#include "gpbo/rng.hpp"
#include "gpbo/search_space.hpp"

namespace gpbo {

struct FireflyConfig {
  int max_evaluations = 75000;
  int batch_size = 25;
  double gamma = 0.0;  // <= 0 means 4.5 / D
  double eta_attract = 1.5;
  double eta_repel = 0.008;
  double omega_continuous = 0.16;
  double omega_categorical = 0.0;  // <= 0 means 1.0, or 30.0 for purely categorical spaces
  double unsuccessful_shrink = 0.7;
  double keep_probability = 0.96;
  int trapped_after = 5;  // consecutive non-improving updates before replacement

  void validate() const;
};

/// min(10 + D/2 + D^1.2, 100) rounded up to a multiple of the batch size.
int firefly_pool_size(int dim, int batch_size);

/// Firefly-space layout: continuous features followed by one one-hot block per
/// categorical parameter.
class FireflyEncoding {
 public:
  explicit FireflyEncoding(const SearchSpace& space);

  int width() const { return width_; }
  int num_continuous() const { return space_->num_continuous(); }
  bool purely_categorical() const { return space_->num_continuous() == 0 && space_->num_categorical() > 0; }
  /// true for one-hot columns.
  const std::vector<bool>& categorical_columns() const { return is_categorical_; }

  Eigen::RowVectorXd encode(const FeatureVector& x) const;
  Eigen::RowVectorXd random_row(Rng& rng) const;

  /// Nearest feasible feature vector: INTEGER/DISCRETE slots snap to the
  /// nearest feasible value; each one-hot block is sampled as an unnormalised
  /// distribution (uniform when the clamped block is all zero).
  FeatureVector round(const Eigen::RowVectorXd& row, Rng& rng) const;

 private:
  const SearchSpace* space_;
  int width_ = 0;
  std::vector<int> block_offset_;
  std::vector<bool> is_categorical_;
};

/// Rounds a firefly row and maps it to user-facing parameter values.
ParameterDict round_to_feasible(const Eigen::RowVectorXd& row, const SearchSpace& space, Rng& rng);

struct FireflyForces {
  double gamma;
  double eta_attract;
  double eta_repel;
};

/// One vectorised move of a batch against the whole pool:
/// X~ += (1/P) sum_j eta_ij exp(-gamma r_ij^2) (X_j - X~_i) + Laplace(0, omega_i).
/// eta_ij is +eta_attract when pool member j scores higher than batch row i,
/// -eta_repel when it scores lower, zero on ties. `noise_scale` is p x width;
/// a zero matrix disables the perturbation.
Eigen::MatrixXd vectorized_update(const Eigen::MatrixXd& batch, const Eigen::MatrixXd& pool,
                                  const Eigen::VectorXd& pool_scores, const Eigen::VectorXd& batch_scores,
                                  const FireflyForces& forces, const Eigen::MatrixXd& noise_scale, Rng& rng);

using BatchScoreFn = std::function<Eigen::VectorXd(const FeatureMatrix&)>;

struct FireflyResult {
  FeatureVector best;
  double best_score = 0.0;
  long evaluations = 0;
  std::vector<double> best_trace;  // best-so-far after the initial pool and each sweep
};

/// Maximises `score` over the feasible points of `space`. Up to pool-size rows
/// of `warm_start` seed the initial pool; the rest are random.
FireflyResult firefly_optimize(const BatchScoreFn& score, const SearchSpace& space, const FireflyConfig& config,
                               Rng& rng, const std::vector<FeatureVector>& warm_start = {});

}  // namespace gpbo
