#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace cepfield::opt {

/// Objective to minimize. May return +inf (or throw NotPositiveDefinite) at
/// inadmissible points; the line search backs off from them.
using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Finite-difference step for coordinate i: step * max(1, |x_i|).
Eigen::VectorXd central_gradient(const Objective& f, const Eigen::VectorXd& x, double step = 1e-5);
Eigen::MatrixXd central_hessian(const Objective& f, const Eigen::VectorXd& x, double step = 1e-4);

struct BfgsOptions {
  double grad_tol = 1e-6;
  double fd_step = 1e-5;
  int max_iter = 500;
  double max_step = 1.0;  // cap on the infinity norm of a single step
  /// Starting inverse-Hessian approximation; a scaled identity when empty.
  Eigen::MatrixXd inverse_hessian;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  Eigen::VectorXd grad;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;  // max |grad| < grad_tol
  std::string message;
  Eigen::MatrixXd inverse_hessian;
};

BfgsResult minimize_bfgs(const Objective& f, const Eigen::VectorXd& x0, const BfgsOptions& opts = {});

}  // namespace cepfield::opt
