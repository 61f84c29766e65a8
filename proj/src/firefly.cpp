#include "gpbo/firefly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gpbo/errors.hpp"

namespace gpbo {

void FireflyConfig::validate() const {
  if (max_evaluations < 0 || batch_size < 1) throw ConfigError("firefly budget and batch size must be valid");
  if (!(eta_attract > 0 && eta_repel > 0 && omega_continuous > 0 && unsuccessful_shrink > 0)) {
    throw ConfigError("firefly force and perturbation parameters must be positive");
  }
  if (!(keep_probability > 0.0 && keep_probability <= 1.0)) throw ConfigError("keep_probability must lie in (0, 1]");
}

int firefly_pool_size(int dim, int batch_size) {
  const double d = std::max(dim, 1);
  const double raw = std::min(10.0 + 0.5 * d + std::pow(d, 1.2), 100.0);
  const int blocks = static_cast<int>(std::ceil(raw / batch_size));
  return std::max(1, blocks) * batch_size;
}

FireflyEncoding::FireflyEncoding(const SearchSpace& space) : space_(&space) {
  width_ = space.num_continuous();
  is_categorical_.assign(width_, false);
  for (int j = 0; j < space.num_categorical(); ++j) {
    block_offset_.push_back(width_);
    const int k = space.categorical(j).num_categories();
    width_ += k;
    is_categorical_.insert(is_categorical_.end(), k, true);
  }
}

Eigen::RowVectorXd FireflyEncoding::encode(const FeatureVector& x) const {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(width_);
  row.head(num_continuous()) = x.continuous.transpose();
  for (std::size_t j = 0; j < block_offset_.size(); ++j) row[block_offset_[j] + x.categorical[j]] = 1.0;
  return row;
}

Eigen::RowVectorXd FireflyEncoding::random_row(Rng& rng) const {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(width_);
  for (int i = 0; i < num_continuous(); ++i) row[i] = rng.uniform();
  for (std::size_t j = 0; j < block_offset_.size(); ++j) {
    row[block_offset_[j] + rng.index(space_->categorical(static_cast<int>(j)).num_categories())] = 1.0;
  }
  return row;
}

FeatureVector FireflyEncoding::round(const Eigen::RowVectorXd& row, Rng& rng) const {
  FeatureVector x;
  x.continuous.resize(num_continuous());
  for (int i = 0; i < num_continuous(); ++i) {
    const auto& p = space_->continuous(i);
    const double u = std::clamp(row[i], 0.0, 1.0);
    x.continuous[i] = p.type == ParameterType::kDouble ? u : scale_to_unit(unscale_from_unit(u, p), p);
  }
  x.categorical.resize(block_offset_.size());
  for (std::size_t j = 0; j < block_offset_.size(); ++j) {
    const int k = space_->categorical(static_cast<int>(j)).num_categories();
    const Eigen::RowVectorXd probs = row.segment(block_offset_[j], k).cwiseMax(0.0);
    const double total = probs.sum();
    if (!(total > 0.0) || !std::isfinite(total)) {
      x.categorical[j] = rng.index(k);
      continue;
    }
    double draw = rng.uniform() * total;
    int chosen = k - 1;
    for (int c = 0; c < k; ++c) {
      if (probs[c] <= 0.0) continue;
      draw -= probs[c];
      if (draw < 0.0) {
        chosen = c;
        break;
      }
    }
    while (probs[chosen] <= 0.0) --chosen;  // rounding tail: last positive category
    x.categorical[j] = chosen;
  }
  return x;
}

ParameterDict round_to_feasible(const Eigen::RowVectorXd& row, const SearchSpace& space, Rng& rng) {
  return space.unfeaturize(FireflyEncoding(space).round(row, rng));
}

Eigen::MatrixXd vectorized_update(const Eigen::MatrixXd& batch, const Eigen::MatrixXd& pool,
                                  const Eigen::VectorXd& pool_scores, const Eigen::VectorXd& batch_scores,
                                  const FireflyForces& forces, const Eigen::MatrixXd& noise_scale, Rng& rng) {
  const auto pool_size = static_cast<double>(pool.rows());
  Eigen::MatrixXd out = batch;
  for (Eigen::Index i = 0; i < batch.rows(); ++i) {
    Eigen::RowVectorXd force = Eigen::RowVectorXd::Zero(batch.cols());
    for (Eigen::Index j = 0; j < pool.rows(); ++j) {
      double eta = 0.0;
      if (pool_scores[j] > batch_scores[i]) {
        eta = forces.eta_attract;
      } else if (pool_scores[j] < batch_scores[i]) {
        eta = -forces.eta_repel;
      }
      if (eta == 0.0) continue;
      const Eigen::RowVectorXd diff = pool.row(j) - batch.row(i);
      force += eta * std::exp(-forces.gamma * diff.squaredNorm()) * diff;
    }
    out.row(i) += force / pool_size;
    for (Eigen::Index d = 0; d < batch.cols(); ++d) {
      if (noise_scale(i, d) > 0.0) out(i, d) += rng.laplace(noise_scale(i, d));
    }
  }
  return out;
}

FireflyResult firefly_optimize(const BatchScoreFn& score, const SearchSpace& space, const FireflyConfig& config,
                               Rng& rng, const std::vector<FeatureVector>& warm_start) {
  config.validate();
  const FireflyEncoding enc(space);
  const int dim = std::max(space.size(), 1);
  const int batch = config.batch_size;
  const int pool_size = firefly_pool_size(dim, batch);
  const FireflyForces forces{config.gamma > 0.0 ? config.gamma : 4.5 / dim, config.eta_attract, config.eta_repel};
  const double omega_cat =
      config.omega_categorical > 0.0 ? config.omega_categorical : (enc.purely_categorical() ? 30.0 : 1.0);
  Eigen::RowVectorXd omega(enc.width());
  for (int d = 0; d < enc.width(); ++d) omega[d] = enc.categorical_columns()[d] ? omega_cat : config.omega_continuous;

  Eigen::MatrixXd pool(pool_size, enc.width());
  for (int i = 0; i < pool_size; ++i) {
    pool.row(i) = i < static_cast<int>(warm_start.size()) ? enc.encode(warm_start[i]) : enc.random_row(rng);
  }

  FireflyResult result;
  result.best_score = -std::numeric_limits<double>::infinity();
  bool have_best = false;
  const auto evaluate = [&](const Eigen::MatrixXd& rows) {
    std::vector<FeatureVector> rounded;
    rounded.reserve(static_cast<std::size_t>(rows.rows()));
    for (Eigen::Index i = 0; i < rows.rows(); ++i) rounded.push_back(enc.round(rows.row(i), rng));
    const Eigen::VectorXd s = score(FeatureMatrix(rounded));
    result.evaluations += rows.rows();
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (!have_best || s[i] > result.best_score) {
        have_best = !std::isnan(s[i]);
        result.best_score = std::isnan(s[i]) ? result.best_score : s[i];
        result.best = rounded[i];
      }
    }
    return s;
  };

  Eigen::VectorXd scores = evaluate(pool);
  result.best_trace.push_back(result.best_score);

  Eigen::VectorXd perturbation = Eigen::VectorXd::Ones(pool_size);
  Eigen::VectorXi unsuccessful = Eigen::VectorXi::Zero(pool_size);
  const long max_sweeps = config.max_evaluations / pool_size;

  for (long sweep = 0; sweep < max_sweeps; ++sweep) {
    for (int start = 0; start < pool_size; start += batch) {
      const Eigen::MatrixXd current = pool.middleRows(start, batch);
      const Eigen::VectorXd current_scores = scores.segment(start, batch);
      Eigen::MatrixXd noise(batch, enc.width());
      for (int i = 0; i < batch; ++i) noise.row(i) = perturbation[start + i] * omega;

      Eigen::MatrixXd moved = vectorized_update(current, pool, scores, current_scores, forces, noise, rng);
      moved = moved.cwiseMax(0.0).cwiseMin(1.0);
      const Eigen::VectorXd moved_scores = evaluate(moved);

      // Scores persist after the whole batch has moved.
      for (int i = 0; i < batch; ++i) {
        const int k = start + i;
        if (moved_scores[i] > scores[k] || !std::isfinite(scores[k])) {
          pool.row(k) = moved.row(i);
          scores[k] = moved_scores[i];
          perturbation[k] = 1.0;
          unsuccessful[k] = 0;
        } else {
          perturbation[k] *= config.unsuccessful_shrink;
          ++unsuccessful[k];
        }
      }
    }

    // Refresh: random newcomers replace dropped or trapped fireflies. The
    // current leader is never dropped.
    Eigen::Index leader = 0;
    scores.maxCoeff(&leader);
    for (int k = 0; k < pool_size; ++k) {
      if (k == leader) continue;
      const bool trapped = unsuccessful[k] > config.trapped_after;
      if (trapped || !rng.bernoulli(config.keep_probability)) {
        pool.row(k) = enc.random_row(rng);
        scores[k] = -std::numeric_limits<double>::infinity();
        perturbation[k] = 1.0;
        unsuccessful[k] = 0;
      }
    }
    result.best_trace.push_back(result.best_score);
  }
  return result;
}

}  // namespace gpbo
