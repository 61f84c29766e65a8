#include <cmath>

#include "doctest.h"
#include "gpbo/acquisition.hpp"
#include "gpbo/firefly.hpp"

using namespace gpbo;

namespace {

SearchSpace unit_space(int d) {
  std::vector<ParameterConfig> ps;
  for (int i = 0; i < d; ++i) ps.push_back(ParameterConfig::Double("x" + std::to_string(i), 0, 1));
  return SearchSpace(ps);
}

BatchScoreFn center_score() {
  return [](const FeatureMatrix& x) -> Eigen::VectorXd {
    return -(x.continuous.array() - 0.5).square().rowwise().sum().matrix();
  };
}

}  // namespace

TEST_CASE("pool size") {
  CHECK(firefly_pool_size(1, 25) == 25);
  CHECK(firefly_pool_size(4, 25) == 25);
  CHECK(firefly_pool_size(20, 25) == 75);  // 56.4 rounded up
  CHECK(firefly_pool_size(100, 25) == 100);
}

TEST_CASE("vectorized update examples") {
  Rng rng(1);
  const FireflyForces f{2.0, 1.5, 0.008};
  Eigen::MatrixXd pool(3, 2);
  pool << 0.4, 0.4, 0.4, 0.4, 0.4, 0.4;
  const Eigen::Vector3d scores(0, 1, 2);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 2);
  CHECK(vectorized_update(pool, pool, scores, scores, f, zero, rng).isApprox(pool));

  Eigen::MatrixXd two(2, 2);
  two << 0.3, 0.3, 0.6, 0.7;
  const Eigen::Vector2d s2(0, 1);
  const Eigen::RowVector2d delta = two.row(1) - two.row(0);
  const double decay = std::exp(-f.gamma * delta.squaredNorm());
  const Eigen::MatrixXd moved = vectorized_update(two, two, s2, s2, f, Eigen::MatrixXd::Zero(2, 2), rng);
  CHECK((moved.row(0) - (two.row(0) + f.eta_attract / 2 * decay * delta)).norm() < 1e-14);
  CHECK((moved.row(1) - (two.row(1) + f.eta_repel / 2 * decay * delta)).norm() < 1e-14);

  const FireflyForces cold{1e12, 1.5, 0.008};
  CHECK(vectorized_update(two, two, s2, s2, cold, Eigen::MatrixXd::Zero(2, 2), rng).isApprox(two));
}

TEST_CASE("noiseless update is the mean of the individual forces") {
  // Each row moves to the average of old + force_j, a point in the convex hull
  // of those candidates.
  Rng rng(7);
  const FireflyForces f{1.3, 1.5, 0.008};
  const int p = 4, P = 9, w = 3;
  Eigen::MatrixXd pool(P, w);
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < w; ++j) pool(i, j) = rng.uniform();
  Eigen::VectorXd scores(P);
  for (int i = 0; i < P; ++i) scores[i] = rng.normal();
  const Eigen::MatrixXd batch = pool.topRows(p);
  const Eigen::MatrixXd moved =
      vectorized_update(batch, pool, scores, scores.head(p), f, Eigen::MatrixXd::Zero(p, w), rng);
  for (int i = 0; i < p; ++i) {
    Eigen::RowVectorXd expect = Eigen::RowVectorXd::Zero(w);
    for (int j = 0; j < P; ++j) {
      const Eigen::RowVectorXd d = pool.row(j) - batch.row(i);
      const double eta = scores[j] > scores[i] ? f.eta_attract : (scores[j] < scores[i] ? -f.eta_repel : 0.0);
      expect += (batch.row(i) + eta * std::exp(-f.gamma * d.squaredNorm()) * d) / P;
    }
    CHECK((moved.row(i) - expect).norm() < 1e-13);
  }
}

TEST_CASE("Laplace perturbation has the requested scale") {
  Rng rng(2);
  const int p = 2000;
  const Eigen::MatrixXd batch = Eigen::MatrixXd::Constant(p, 1, 0.5);
  const Eigen::VectorXd scores = Eigen::VectorXd::Zero(p);
  const Eigen::MatrixXd noise = Eigen::MatrixXd::Constant(p, 1, 0.16);
  const Eigen::MatrixXd moved = vectorized_update(batch, batch, scores, scores, {1.0, 1.5, 0.008}, noise, rng);
  const double mean_abs = (moved.array() - 0.5).abs().mean();
  CHECK(mean_abs == doctest::Approx(0.16).epsilon(0.06));
}

TEST_CASE("round_to_feasible examples") {
  Rng rng(3);
  SearchSpace space({ParameterConfig::Double("d", 0, 10), ParameterConfig::Integer("i", 0, 10),
                     ParameterConfig::Categorical("c", {"a", "b", "c"})});
  Eigen::RowVectorXd row(5);
  row << 0.37, 0.26, 0.0, 1.0, 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto p = round_to_feasible(row, space, rng);
    CHECK(std::get<double>(p.at("d")) == doctest::Approx(3.7));
    CHECK(std::get<double>(p.at("i")) == 3.0);
    CHECK(std::get<std::string>(p.at("c")) == "b");
  }
  row << 1.4, -0.2, 0.0, 0.0, 0.0;
  const auto p = round_to_feasible(row, space, rng);
  CHECK(std::get<double>(p.at("d")) == 10.0);
  CHECK(std::get<double>(p.at("i")) == 0.0);
  CHECK(space.contains(p));
}

TEST_CASE("firefly finds the center of a quadratic") {
  Rng rng(11);
  const auto res = firefly_optimize(center_score(), unit_space(5), FireflyConfig{}, rng);
  CHECK((res.best.continuous.array() - 0.5).abs().maxCoeff() < 0.05);
  CHECK(res.evaluations <= FireflyConfig{}.max_evaluations + firefly_pool_size(5, 25));
  for (std::size_t i = 1; i < res.best_trace.size(); ++i) CHECK(res.best_trace[i] >= res.best_trace[i - 1]);
}

TEST_CASE("firefly is deterministic and feasible") {
  SearchSpace space({ParameterConfig::Integer("n", 1, 7), ParameterConfig::Discrete("d", {0.1, 0.5, 3}),
                     ParameterConfig::Categorical("c", {"x", "y", "z", "w"}), ParameterConfig::Double("u", -1, 1)});
  FireflyConfig cfg;
  cfg.max_evaluations = 2000;
  const BatchScoreFn score = [](const FeatureMatrix& x) -> Eigen::VectorXd {
    Eigen::VectorXd s = -x.continuous.rowwise().squaredNorm();
    for (Eigen::Index i = 0; i < x.rows(); ++i) s[i] += x.categorical(i, 0) == 2 ? 1.0 : 0.0;
    return s;
  };
  Rng a(5), b(5);
  const auto ra = firefly_optimize(score, space, cfg, a);
  const auto rb = firefly_optimize(score, space, cfg, b);
  CHECK(ra.best == rb.best);
  CHECK(ra.best_score == rb.best_score);
  const auto params = space.unfeaturize(ra.best);
  CHECK(space.contains(params));
  CHECK(space.featurize(params) == ra.best);
  CHECK(ra.best.categorical[0] == 2);
}

TEST_CASE("constant score and zero budget terminate") {
  FireflyConfig cfg;
  cfg.max_evaluations = 0;
  Rng rng(1);
  const BatchScoreFn flat = [](const FeatureMatrix& x) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(x.rows()); };
  const auto res = firefly_optimize(flat, unit_space(3), cfg, rng);
  CHECK(res.evaluations == firefly_pool_size(3, 25));
  CHECK(res.best_score == 0.0);
  cfg.max_evaluations = 500;
  const auto res2 = firefly_optimize(flat, unit_space(3), cfg, rng);
  CHECK(res2.evaluations <= 500 + 25);
}

TEST_CASE("firefly respects a trust region around the center") {
  const auto space = unit_space(4);
  FeatureVector center;
  center.continuous = Eigen::VectorXd::Constant(4, 0.5);
  const TrustRegion tr = make_trust_region({center}, 1, 4);
  const BatchScoreFn score = [&](const FeatureMatrix& x) -> Eigen::VectorXd {
    Eigen::VectorXd s = -(x.continuous.array() - 1.0).square().rowwise().sum().matrix();
    apply_trust_region(s, x, tr);
    return s;
  };
  FireflyConfig cfg;
  cfg.max_evaluations = 20000;
  Rng rng(8);
  const auto res = firefly_optimize(score, space, cfg, rng);
  CHECK(tr_distance(res.best, tr) <= tr.radius + 1e-12);
  CHECK(res.best_score > -kTrustRegionPenalty);
}
