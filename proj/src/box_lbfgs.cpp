#include "gpbo/box_lbfgs.hpp"

#include <cmath>
#include <deque>
#include <vector>

namespace gpbo {

namespace {

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

/// Variables pinned at a bound that the negative gradient pushes further out.
Eigen::VectorXd free_mask(const Eigen::VectorXd& x, const Eigen::VectorXd& g, const Eigen::VectorXd& lo,
                          const Eigen::VectorXd& hi) {
  Eigen::VectorXd mask = Eigen::VectorXd::Ones(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if ((x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0)) mask[i] = 0.0;
  }
  return mask;
}

struct Correction {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;
};

Eigen::VectorXd two_loop(const Eigen::VectorXd& g, const std::deque<Correction>& memory,
                         const Eigen::VectorXd& mask) {
  Eigen::VectorXd q = g.cwiseProduct(mask);
  std::vector<double> alpha(memory.size());
  for (int k = static_cast<int>(memory.size()) - 1; k >= 0; --k) {
    const auto& c = memory[k];
    alpha[k] = c.rho * c.s.cwiseProduct(mask).dot(q);
    q -= alpha[k] * c.y.cwiseProduct(mask);
  }
  if (!memory.empty()) {
    const auto& last = memory.back();
    q *= last.s.dot(last.y) / last.y.squaredNorm();
  }
  for (std::size_t k = 0; k < memory.size(); ++k) {
    const auto& c = memory[k];
    const double beta = c.rho * c.y.cwiseProduct(mask).dot(q);
    q += (alpha[k] - beta) * c.s.cwiseProduct(mask);
  }
  return -q.cwiseProduct(mask);
}

}  // namespace

BoxLbfgsResult minimize_box_lbfgs(const GradientObjective& objective, const Eigen::VectorXd& x0,
                                  const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                  const BoxLbfgsOptions& options) {
  BoxLbfgsResult result;
  Eigen::VectorXd x = project(x0, lower, upper);
  Eigen::VectorXd g(x.size());
  double f = objective(x, g);
  result.evaluations = 1;
  result.x = x;
  result.value = f;
  if (!std::isfinite(f)) return result;

  std::deque<Correction> memory;
  Eigen::VectorXd g_new(x.size());
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    const Eigen::VectorXd projected_step = project(x - g, lower, upper) - x;
    if (projected_step.lpNorm<Eigen::Infinity>() < options.projected_gradient_tol) {
      result.converged = true;
      break;
    }

    const Eigen::VectorXd mask = free_mask(x, g, lower, upper);
    Eigen::VectorXd d = two_loop(g, memory, mask);
    if (!(g.dot(d) < 0.0)) {
      memory.clear();
      d = -g.cwiseProduct(mask);
    }
    double step = memory.empty() ? std::min(1.0, 1.0 / std::max(d.lpNorm<Eigen::Infinity>(), 1e-12)) : 1.0;

    bool accepted = false;
    Eigen::VectorXd x_new;
    double f_new = f;
    for (int ls = 0; ls < options.max_line_search_steps; ++ls) {
      x_new = project(x + step * d, lower, upper);
      f_new = objective(x_new, g_new);
      ++result.evaluations;
      if (std::isfinite(f_new) && f_new <= f + options.armijo * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (memory.empty()) break;
      memory.clear();  // retry from steepest descent
      continue;
    }

    Correction c{x_new - x, g_new - g, 0.0};
    const double sy = c.s.dot(c.y);
    if (sy > 1e-10 * c.y.squaredNorm()) {
      c.rho = 1.0 / sy;
      memory.push_back(std::move(c));
      if (static_cast<int>(memory.size()) > options.memory) memory.pop_front();
    }
    const double decrease = f - f_new;
    x = x_new;
    f = f_new;
    g = g_new;
    result.x = x;
    result.value = f;
    if (decrease <= options.relative_function_tol * std::max(1.0, std::abs(f))) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace gpbo
