#pragma once

#include <Eigen/Core>
#include <functional>

namespace gpbo {

/// Limited-memory BFGS restricted to a box, using gradient projection.
///
/// The search direction comes from the two-loop recursion over the free
/// variables (those not held at a bound by the gradient); each iteration
/// backtracks along the projected path until the Armijo condition holds.
struct BoxLbfgsOptions {
  int max_iterations = 50;
  int max_line_search_steps = 20;
  int memory = 10;
  double armijo = 1e-4;
  double projected_gradient_tol = 1e-6;
  double relative_function_tol = 1e-10;
};

struct BoxLbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Objective returns f(x) and writes the gradient. Non-finite values are
/// treated as infeasible steps.
using GradientObjective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

BoxLbfgsResult minimize_box_lbfgs(const GradientObjective& objective, const Eigen::VectorXd& x0,
                                  const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                  const BoxLbfgsOptions& options = {});

}  // namespace gpbo
