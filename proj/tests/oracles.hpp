#pragma once

// Independent reference implementations used only by tests. They are written
// from the textbook definitions with plain loops and dense linear algebra and
// share no code with the library beyond its data types.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

/// Standard normal quantile by bisection on the CDF written via erfc.
inline double normal_quantile(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double cdf = 0.5 * std::erfc(-mid / std::sqrt(2.0));
    (cdf < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Digit-reversal of `index` in `base`.
inline double radical_inverse(long index, int base) {
  double result = 0.0, f = 1.0 / base;
  while (index > 0) {
    result += f * (index % base);
    index /= base;
    f /= base;
  }
  return result;
}

/// Exact dominated area of 2-D points (maximisation) above `ref`, by sweeping
/// in decreasing first coordinate.
inline double exact_hv_2d(std::vector<std::pair<double, double>> pts, std::pair<double, double> ref) {
  std::erase_if(pts, [&](const auto& p) { return p.first <= ref.first || p.second <= ref.second; });
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  double area = 0.0, top = ref.second;
  for (const auto& [x, y] : pts) {
    if (y > top) {
      area += (x - ref.first) * (y - top);
      top = y;
    }
  }
  return area;
}

/// Mixed Matern-5/2 kernel from its definition. Continuous rows in `xc`,
/// categorical indices in `xk`; log squared length scales continuous first.
struct DenseData {
  Eigen::MatrixXd xc;
  Eigen::MatrixXi xk;
  Eigen::VectorXd y;
};

inline double kernel(const Eigen::RowVectorXd& ac, const Eigen::RowVectorXi& ak, const Eigen::RowVectorXd& bc,
                     const Eigen::RowVectorXi& bk, double alpha_log, const Eigen::VectorXd& lambda_log) {
  double d2 = 0.0;
  const long nc = ac.size();
  for (long d = 0; d < nc; ++d) d2 += 5.0 * (ac[d] - bc[d]) * (ac[d] - bc[d]) / std::exp(lambda_log[d]);
  for (long c = 0; c < ak.size(); ++c) d2 += 5.0 * (ak[c] != bk[c] ? 1.0 : 0.0) / std::exp(lambda_log[nc + c]);
  const double r = std::sqrt(d2);
  return std::exp(2.0 * alpha_log) * (1.0 + r + r * r / 3.0) * std::exp(-r);
}

/// Posterior mean and stddev by explicit inversion of K + diag_add I.
inline std::pair<double, double> dense_posterior(const DenseData& data, const Eigen::RowVectorXd& qc,
                                                 const Eigen::RowVectorXi& qk, double alpha_log,
                                                 const Eigen::VectorXd& lambda_log, double diag_add) {
  const long t = data.y.size();
  const double prior_var = std::exp(2.0 * alpha_log);
  if (t == 0) return {0.0, std::sqrt(prior_var)};
  Eigen::MatrixXd k(t, t);
  Eigen::VectorXd ks(t);
  for (long i = 0; i < t; ++i) {
    for (long j = 0; j < t; ++j)
      k(i, j) = kernel(data.xc.row(i), data.xk.row(i), data.xc.row(j), data.xk.row(j), alpha_log, lambda_log);
    ks[i] = kernel(data.xc.row(i), data.xk.row(i), qc, qk, alpha_log, lambda_log);
    k(i, i) += diag_add;
  }
  const Eigen::MatrixXd inv = k.fullPivLu().inverse();
  const double mu = ks.dot(inv * data.y);
  const double var = std::max(0.0, prior_var - ks.dot(inv * ks));
  return {mu, std::sqrt(var)};
}

/// log N(y; 0, K + diag_add I) via determinant and inverse.
inline double dense_log_marginal(const DenseData& data, double alpha_log, const Eigen::VectorXd& lambda_log,
                                 double diag_add) {
  const long t = data.y.size();
  Eigen::MatrixXd k(t, t);
  for (long i = 0; i < t; ++i)
    for (long j = 0; j < t; ++j)
      k(i, j) = kernel(data.xc.row(i), data.xk.row(i), data.xc.row(j), data.xk.row(j), alpha_log, lambda_log) +
                (i == j ? diag_add : 0.0);
  const double quad = data.y.dot(k.fullPivLu().inverse() * data.y);
  return -0.5 * quad - 0.5 * std::log(k.determinant()) - 0.5 * t * std::log(2.0 * std::numbers::pi);
}

/// Truncated normal log-density with the normalising mass of the support.
inline double truncated_normal_log_pdf(double x, double mean, double var, double lo, double hi) {
  if (x < lo || x > hi) return -INFINITY;
  const double sd = std::sqrt(var);
  auto cdf = [&](double v) { return 0.5 * std::erfc(-(v - mean) / (sd * std::sqrt(2.0))); };
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd * std::sqrt(2.0 * std::numbers::pi)) - std::log(cdf(hi) - cdf(lo));
}

// Standard BBOB definitions (minimisation, optimum value 0), written in terms
// of the distance to the optimiser; callers negate and shift as needed.
namespace bbob {

inline double sphere(const std::vector<double>& x) {
  double s = 0;
  for (double v : x) s += v * v;
  return s;
}

inline double rastrigin(const std::vector<double>& x) {
  double s = 10.0 * x.size();
  for (double v : x) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
  return s;
}

inline double rosenbrock(const std::vector<double>& x) {
  const std::size_t d = x.size();
  const double c = std::max(1.0, std::sqrt(static_cast<double>(d)) / 8.0);
  double s = 0;
  for (std::size_t i = 0; i + 1 < d; ++i) {
    const double zi = c * x[i] + 1.0, zn = c * x[i + 1] + 1.0;
    s += 100.0 * std::pow(zi * zi - zn, 2) + std::pow(zi - 1.0, 2);
  }
  return s;
}

inline double discus(const std::vector<double>& x) {
  double s = 1e6 * x[0] * x[0];
  for (std::size_t i = 1; i < x.size(); ++i) s += x[i] * x[i];
  return s;
}

inline double bent_cigar(const std::vector<double>& x) {
  double s = x[0] * x[0];
  for (std::size_t i = 1; i < x.size(); ++i) s += 1e6 * x[i] * x[i];
  return s;
}

inline double cond_exp(std::size_t i, std::size_t d) { return d == 1 ? 0.0 : static_cast<double>(i) / (d - 1); }

// Published form with x_opt = +5 in every coordinate; input is x - x_opt.
inline double linear_slope(const std::vector<double>& x) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i] + 5.0;
    const double si = std::pow(10.0, cond_exp(i, x.size()));
    const double zi = 5.0 * xi < 25.0 ? xi : 5.0;
    s += 5.0 * std::abs(si) - si * zi;
  }
  return s;
}

inline double osz(double v) {
  if (v == 0) return 0;
  const double l = std::log(std::fabs(v));
  return v > 0 ? std::exp(l + 0.049 * (std::sin(10.0 * l) + std::sin(7.9 * l)))
               : -std::exp(l + 0.049 * (std::sin(5.5 * l) + std::sin(3.1 * l)));
}

// Sector orientation taken from a positive optimiser sign.
inline double attractive_sector(const std::vector<double>& x) {
  double s = 0;
  for (double v : x) s += (v > 0 ? 1e4 : 1.0) * v * v;
  return std::pow(osz(s), 0.9);
}

inline double sharp_ridge(const std::vector<double>& x) {
  double r = 0;
  for (std::size_t i = 1; i < x.size(); ++i) r += x[i] * x[i];
  return x[0] * x[0] + 100.0 * std::sqrt(r);
}

inline double different_powers(const std::vector<double>& x) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::pow(std::fabs(x[i]), 2.0 + 4.0 * cond_exp(i, x.size()));
  return std::sqrt(s);
}

// Published bi-Rastrigin with optimiser mu0 / 2 = 1.25 per coordinate;
// input is x - x_opt, so the published argument is x + 1.25.
inline double lunacek(const std::vector<double>& x) {
  const double d = static_cast<double>(x.size());
  const double mu0 = 2.5, s = 1.0 - 1.0 / (2.0 * std::sqrt(d + 20.0) - 8.2);
  const double mu1 = -std::sqrt((mu0 * mu0 - 1.0) / s);
  double a = 0, b = 0, c = 0;
  for (double v : x) {
    const double xh = 2.0 * (v + 1.25);
    a += (xh - mu0) * (xh - mu0);
    b += (xh - mu1) * (xh - mu1);
    c += std::cos(2.0 * std::numbers::pi * (xh - mu0));
  }
  return std::min(a, d + s * b) + 10.0 * (d - c);
}

}  // namespace bbob

}  // namespace oracle
