#include <Eigen/Eigenvalues>
#include <cmath>

#include "doctest.h"
#include "gpbo/box_lbfgs.hpp"
#include "gpbo/errors.hpp"
#include "gpbo/gp_model.hpp"
#include "oracles.hpp"

using namespace gpbo;

namespace {

FeatureVector fv(std::initializer_list<double> c, std::vector<int> k = {}) {
  FeatureVector f;
  f.continuous = Eigen::VectorXd(static_cast<Eigen::Index>(c.size()));
  Eigen::Index i = 0;
  for (double v : c) f.continuous[i++] = v;
  f.categorical = std::move(k);
  return f;
}

FeatureVector random_fv(Rng& rng, int nc, int nk, int cats = 3) {
  FeatureVector f;
  f.continuous = Eigen::VectorXd(nc);
  for (int d = 0; d < nc; ++d) f.continuous[d] = rng.uniform();
  for (int c = 0; c < nk; ++c) f.categorical.push_back(rng.index(cats));
  return f;
}

GpHyperparameters random_hyper(Rng& rng, int dim, const PriorSpec& p, double margin = 0.0) {
  GpHyperparameters h;
  h.alpha_log = rng.uniform(p.amplitude.lower + margin, p.amplitude.upper - margin);
  h.lambda_log = Eigen::VectorXd(dim);
  for (int d = 0; d < dim; ++d) h.lambda_log[d] = rng.uniform(p.length_scale.lower + margin, p.length_scale.upper - margin);
  h.epsilon_log = rng.uniform(p.noise.lower + margin, p.noise.upper - margin);
  return h;
}

oracle::DenseData to_dense(const std::vector<FeatureVector>& pts, const std::vector<double>& y, int nc, int nk) {
  oracle::DenseData d;
  d.xc = Eigen::MatrixXd(pts.size(), nc);
  d.xk = Eigen::MatrixXi(pts.size(), nk);
  d.y = Eigen::VectorXd(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (int c = 0; c < nc; ++c) d.xc(i, c) = pts[i].continuous[c];
    for (int c = 0; c < nk; ++c) d.xk(i, c) = pts[i].categorical[c];
    d.y[i] = y[i];
  }
  return d;
}

}  // namespace

TEST_CASE("scaled_distance_sq examples") {
  CHECK(scaled_distance_sq(fv({0.3, 0.4}), fv({0.3, 0.4}), Eigen::Vector2d::Zero()) == 0.0);
  CHECK(scaled_distance_sq(fv({}, {0}), fv({}, {1}), Eigen::VectorXd::Zero(1)) == doctest::Approx(5.0));
  CHECK(scaled_distance_sq(fv({0.0, 0.0}), fv({0.1, 0.2}), Eigen::Vector2d::Zero()) == doctest::Approx(0.25));
}

TEST_CASE("matern52 examples") {
  CHECK(matern52_of_distance(0.0, 2.0) == doctest::Approx(4.0));
  CHECK(matern52_of_distance(1.0, 1.0) == doctest::Approx(7.0 / 3.0 * std::exp(-1.0)));
  CHECK(matern52_of_distance(1.0, 1.0) == doctest::Approx(0.858385).epsilon(1e-6));
  CHECK(matern52_of_distance(10.0, 1.0) < matern52_of_distance(1.0, 1.0));
  GpHyperparameters h;
  h.alpha_log = std::log(1.7);
  h.lambda_log = Eigen::VectorXd::Zero(2);
  CHECK(matern52(fv({0.2, 0.1}), fv({0.2, 0.1}), h) == doctest::Approx(1.7 * 1.7));
}

TEST_CASE("kernel Gram matrices are positive semidefinite") {
  Rng rng(1);
  PriorSpec p;
  for (int rep = 0; rep < 30; ++rep) {
    const int nc = rng.index(4), nk = 1 + rng.index(2), t = 1 + rng.index(20);
    std::vector<FeatureVector> pts;
    for (int i = 0; i < t; ++i) pts.push_back(random_fv(rng, nc, nk));
    const FeatureMatrix fm(pts);
    const auto h = random_hyper(rng, nc + nk, p);
    const Eigen::MatrixXd k = kernel_matrix(fm, fm, h);
    const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k).eigenvalues().minCoeff();
    CHECK(min_eig >= -1e-8);
  }
}

TEST_CASE("log_joint matches closed forms") {
  PriorSpec p;
  GpHyperparameters h;
  h.alpha_log = -0.5;
  h.lambda_log = Eigen::Vector2d(-0.3, 0.2);
  h.epsilon_log = -4.0;
  const double prior = oracle::truncated_normal_log_pdf(h.alpha_log, std::log(0.039), 50, -3, 1) +
                       oracle::truncated_normal_log_pdf(-0.3, std::log(0.5), 50, -2, 1) +
                       oracle::truncated_normal_log_pdf(0.2, std::log(0.5), 50, -2, 1) +
                       oracle::truncated_normal_log_pdf(-4.0, std::log(0.0039), 50, -10, 0);
  const double a2 = std::exp(2 * h.alpha_log);
  const double diag = std::exp(h.epsilon_log) + kInitialJitter * a2;

  SUBCASE("single observation at zero") {
    WarpedDataset d({fv({0.4, 0.6})}, {0.0});
    const double var = a2 + diag;
    const double ll = -0.5 * std::log(2 * std::numbers::pi * var);
    CHECK(log_joint(d, h, p) == doctest::Approx(prior + ll).epsilon(1e-12));
  }
  SUBCASE("duplicated point against a dense 2x2 normal") {
    const std::vector<FeatureVector> pts = {fv({0.4, 0.6}), fv({0.4, 0.6})};
    WarpedDataset d(pts, {0.3, 0.3});
    const double ll = oracle::dense_log_marginal(to_dense(pts, {0.3, 0.3}, 2, 0), h.alpha_log, h.lambda_log, diag);
    CHECK(log_joint(d, h, p) == doctest::Approx(prior + ll).epsilon(1e-10));
  }
  SUBCASE("outside the support") {
    WarpedDataset d({fv({0.4, 0.6})}, {0.0});
    GpHyperparameters out = h;
    out.alpha_log = 1.0 + 1e-9;
    CHECK(std::isinf(log_joint(d, out, p)));
    CHECK(log_joint(d, out, p) < 0);
    out = h;
    out.epsilon_log = 1.0;
    CHECK(log_joint_with_gradient(d, out, p).value == -INFINITY);
  }
}

TEST_CASE("log_joint matches a dense oracle on mixed data") {
  Rng rng(21);
  PriorSpec p;
  for (int rep = 0; rep < 20; ++rep) {
    const int nc = 1 + rng.index(3), nk = rng.index(2), t = 1 + rng.index(8);
    std::vector<FeatureVector> pts;
    std::vector<double> y;
    for (int i = 0; i < t; ++i) {
      pts.push_back(random_fv(rng, nc, nk));
      y.push_back(rng.normal());
    }
    const auto h = random_hyper(rng, nc + nk, p);
    double prior = oracle::truncated_normal_log_pdf(h.alpha_log, std::log(0.039), 50, -3, 1) +
                   oracle::truncated_normal_log_pdf(h.epsilon_log, std::log(0.0039), 50, -10, 0);
    for (int d = 0; d < nc + nk; ++d)
      prior += oracle::truncated_normal_log_pdf(h.lambda_log[d], std::log(0.5), 50, -2, 1);
    const double diag = std::exp(h.epsilon_log) + kInitialJitter * std::exp(2 * h.alpha_log);
    const double ll = oracle::dense_log_marginal(to_dense(pts, y, nc, nk), h.alpha_log, h.lambda_log, diag);
    CHECK(log_joint(WarpedDataset(pts, y), h, p) == doctest::Approx(prior + ll).epsilon(1e-8));
  }
}

TEST_CASE("analytic gradient matches central differences") {
  Rng rng(4);
  PriorSpec p;
  for (int rep = 0; rep < 10; ++rep) {
    const int nc = 1 + rng.index(3), nk = rng.index(2), t = 2 + rng.index(6);
    std::vector<FeatureVector> pts;
    std::vector<double> y;
    for (int i = 0; i < t; ++i) {
      pts.push_back(random_fv(rng, nc, nk));
      y.push_back(rng.normal());
    }
    const WarpedDataset data(pts, y);
    const auto h = random_hyper(rng, nc + nk, p, 1e-3);
    const Eigen::VectorXd g = log_joint_with_gradient(data, h, p).gradient;
    const Eigen::VectorXd x = h.pack();
    Eigen::VectorXd fd(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Eigen::VectorXd a = x, b = x;
      a[i] += 1e-5;
      b[i] -= 1e-5;
      fd[i] = (log_joint(data, GpHyperparameters::unpack(a), p) - log_joint(data, GpHyperparameters::unpack(b), p)) /
              2e-5;
    }
    CHECK((g - fd).norm() / std::max(fd.norm(), 1e-8) < 1e-4);
  }
}

TEST_CASE("posterior matches explicit inversion") {
  Rng rng(9);
  PriorSpec p;
  for (int rep = 0; rep < 20; ++rep) {
    const int nc = 1 + rng.index(3), nk = rng.index(2), t = 1 + rng.index(5);
    std::vector<FeatureVector> pts;
    std::vector<double> y;
    for (int i = 0; i < t; ++i) {
      pts.push_back(random_fv(rng, nc, nk));
      y.push_back(rng.normal());
    }
    const auto h = random_hyper(rng, nc + nk, p);
    const GpPosterior post(WarpedDataset(pts, y), h);
    const double diag = std::exp(h.epsilon_log) + post.jitter() * std::exp(2 * h.alpha_log);
    const auto dense = to_dense(pts, y, nc, nk);
    for (int q = 0; q < 5; ++q) {
      const auto x = random_fv(rng, nc, nk);
      Eigen::RowVectorXi qk(nk);
      for (int c = 0; c < nk; ++c) qk[c] = x.categorical[c];
      const auto [mu, sd] = oracle::dense_posterior(dense, x.continuous.transpose(), qk, h.alpha_log, h.lambda_log, diag);
      CHECK(std::abs(post.mean(x) - mu) <= 1e-8 * (std::abs(mu) + 1e-6));
      CHECK(std::abs(post.stddev(x) - sd) <= 1e-8 * (std::abs(sd) + 1e-6));
    }
  }
}

TEST_CASE("posterior special cases") {
  GpHyperparameters h;
  h.alpha_log = -0.2;
  h.lambda_log = Eigen::VectorXd::Constant(2, -1.0);
  h.epsilon_log = -10.0;

  SUBCASE("no data gives the prior") {
    const GpPosterior post(WarpedDataset(2, 0), h);
    CHECK(post.mean(fv({0.1, 0.9})) == 0.0);
    CHECK(post.stddev(fv({0.1, 0.9})) == doctest::Approx(std::exp(-0.2)));
  }
  SUBCASE("near-noiseless single point") {
    const GpPosterior post(WarpedDataset({fv({0.3, 0.3})}, {1.25}), h);
    const double a2 = std::exp(-0.4);
    CHECK(post.mean(fv({0.3, 0.3})) == doctest::Approx(a2 / (a2 + std::exp(-10.0)) * 1.25).epsilon(1e-6));
    CHECK(std::abs(post.mean(fv({0.3, 0.3})) - 1.25) < 1e-3);
  }
  SUBCASE("far queries revert to the prior") {
    GpHyperparameters tight = h;
    tight.lambda_log = Eigen::VectorXd::Constant(2, -2.0);
    const GpPosterior post(WarpedDataset({fv({0.0, 0.0})}, {1.0}), tight);
    CHECK(std::abs(post.mean(fv({6.0, 6.0}))) < 1e-3);
    CHECK(post.stddev(fv({6.0, 6.0})) == doctest::Approx(std::exp(-0.2)).epsilon(1e-3));
  }
}

TEST_CASE("constant liar affects only the variance path") {
  Rng rng(13);
  GpHyperparameters h;
  h.alpha_log = 0.0;
  h.lambda_log = Eigen::VectorXd::Constant(2, -1.0);
  h.epsilon_log = -6.0;
  std::vector<FeatureVector> pts;
  std::vector<double> y;
  for (int i = 0; i < 6; ++i) {
    pts.push_back(random_fv(rng, 2, 0));
    y.push_back(rng.normal());
  }
  const GpPosterior post(WarpedDataset(pts, y), h);
  const auto pending = random_fv(rng, 2, 0);
  const auto liar = post.with_extra_variance_points({pending});
  CHECK(liar.mean(pending) == doctest::Approx(post.mean(pending)).epsilon(1e-14));
  CHECK(liar.stddev(pending) < post.stddev(pending));
  CHECK(liar.stddev(pending, false) == doctest::Approx(post.stddev(pending)));

  const auto [m0, s0] = predict_batch(post, {pending});
  CHECK(m0[0] == doctest::Approx(post.mean(pending)));
  CHECK(s0[0] == doctest::Approx(post.stddev(pending)));
  const auto [m1, s1] = predict_batch(post, {pending}, {pending});
  CHECK(m1[0] == doctest::Approx(m0[0]));
  CHECK(s1[0] < s0[0]);
}

TEST_CASE("posterior is invariant to training row order") {
  Rng rng(17);
  PriorSpec p;
  std::vector<FeatureVector> pts;
  std::vector<double> y;
  for (int i = 0; i < 7; ++i) {
    pts.push_back(random_fv(rng, 2, 1));
    y.push_back(rng.normal());
  }
  const auto h = random_hyper(rng, 3, p);
  const GpPosterior a(WarpedDataset(pts, y), h);
  std::reverse(pts.begin(), pts.end());
  std::reverse(y.begin(), y.end());
  const GpPosterior b(WarpedDataset(pts, y), h);
  for (int q = 0; q < 10; ++q) {
    const auto x = random_fv(rng, 2, 1);
    CHECK(std::abs(a.mean(x) - b.mean(x)) < 1e-10);
    CHECK(std::abs(a.stddev(x) - b.stddev(x)) < 1e-10);
  }
}

TEST_CASE("fit_map ascends and stays in support") {
  Rng rng(23);
  PriorSpec p;
  std::vector<FeatureVector> pts;
  std::vector<double> y;
  for (int i = 0; i < 12; ++i) {
    pts.push_back(random_fv(rng, 2, 1));
    y.push_back(std::sin(6 * pts.back().continuous[0]) + 0.3 * pts.back().categorical[0]);
  }
  const WarpedDataset data(pts, y);
  Rng fit_rng(1);
  const MapFit fit = fit_map(data, p, fit_rng);
  CHECK(!fit.fallback);
  CHECK(p.contains(fit.hyper));
  REQUIRE(fit.initial_log_joints.size() == 4);
  for (double v : fit.initial_log_joints) CHECK(fit.log_joint >= v);
  CHECK(fit.log_joint == doctest::Approx(log_joint(data, fit.hyper, p)));

  Rng one_rng(2);
  const MapFit single = fit_map(WarpedDataset({pts[0]}, {0.0}), p, one_rng);
  CHECK(p.contains(single.hyper));
  CHECK(std::isfinite(single.log_joint));
}

TEST_CASE("fit_map recovers synthetic length scales") {
  // Draw t = 50 observations from a GP whose two length scales differ and
  // check the fitted values land within a factor of three.
  Rng rng(31);
  GpHyperparameters truth;
  truth.alpha_log = 0.0;
  truth.lambda_log = Eigen::Vector2d(std::log(0.05), std::log(1.0));
  truth.epsilon_log = -8.0;
  std::vector<FeatureVector> pts;
  for (int i = 0; i < 50; ++i) pts.push_back(random_fv(rng, 2, 0));
  const FeatureMatrix fm(pts);
  Eigen::MatrixXd k = kernel_matrix(fm, fm, truth);
  k.diagonal().array() += std::exp(truth.epsilon_log);
  const Eigen::MatrixXd l = k.llt().matrixL();
  Eigen::VectorXd z(50);
  for (int i = 0; i < 50; ++i) z[i] = rng.normal();
  const Eigen::VectorXd yv = l * z;
  const WarpedDataset data(pts, std::vector<double>(yv.data(), yv.data() + 50));
  Rng fit_rng(5);
  const MapFit fit = fit_map(data, PriorSpec{}, fit_rng);
  for (int d = 0; d < 2; ++d) {
    const double ratio = std::exp(fit.hyper.lambda_log[d] - truth.lambda_log[d]);
    CHECK(ratio > 1.0 / 3.0);
    CHECK(ratio < 3.0);
  }
}

TEST_CASE("box L-BFGS solves bounded quadratics") {
  const Eigen::Vector3d target(2.0, -0.5, 0.25);
  const GradientObjective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    const Eigen::VectorXd d = x - target;
    Eigen::Vector3d w(1.0, 10.0, 100.0);
    g = 2.0 * w.cwiseProduct(d);
    return d.dot(w.cwiseProduct(d));
  };
  const Eigen::Vector3d lo(-1, -1, -1), hi(1, 1, 1);
  const auto res = minimize_box_lbfgs(f, Eigen::Vector3d(0.9, 0.9, -0.9), lo, hi);
  CHECK(res.x[0] == doctest::Approx(1.0));
  CHECK(res.x[1] == doctest::Approx(-0.5).epsilon(1e-5));
  CHECK(res.x[2] == doctest::Approx(0.25).epsilon(1e-5));
  CHECK(res.iterations <= 50);
}

TEST_CASE("box L-BFGS on Rosenbrock stays inside the box") {
  const GradientObjective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.resize(2);
    g[0] = -2 * (1 - x[0]) - 400 * x[0] * (x[1] - x[0] * x[0]);
    g[1] = 200 * (x[1] - x[0] * x[0]);
    return (1 - x[0]) * (1 - x[0]) + 100 * std::pow(x[1] - x[0] * x[0], 2);
  };
  BoxLbfgsOptions opt;
  opt.max_iterations = 500;
  const auto res = minimize_box_lbfgs(f, Eigen::Vector2d(-1.2, 1.0), Eigen::Vector2d(-2, -2), Eigen::Vector2d(2, 2), opt);
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-4));
}
