#include "cepfield/optimize.hpp"

#include <cmath>
#include <limits>

#include "cepfield/errors.hpp"

namespace cepfield::opt {
namespace {

double safe_eval(const Objective& f, const Eigen::VectorXd& x, int& count) {
  ++count;
  try {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  } catch (const NotPositiveDefinite&) {
    return std::numeric_limits<double>::infinity();
  }
}

double step_for(double xi, double step) { return step * std::max(1.0, std::abs(xi)); }

Eigen::VectorXd gradient(const Objective& f, const Eigen::VectorXd& x, double step, int& count) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = step_for(x[i], step);
    xp[i] = x[i] + h;
    const double fp = safe_eval(f, xp, count);
    xp[i] = x[i] - h;
    const double fm = safe_eval(f, xp, count);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace

Eigen::VectorXd central_gradient(const Objective& f, const Eigen::VectorXd& x, double step) {
  int count = 0;
  return gradient(f, x, step, count);
}

Eigen::MatrixXd central_hessian(const Objective& f, const Eigen::VectorXd& x, double step) {
  const Eigen::Index n = x.size();
  int count = 0;
  const double f0 = safe_eval(f, x, count);
  Eigen::VectorXd h(n);
  for (Eigen::Index i = 0; i < n; ++i) h[i] = step_for(x[i], step);
  auto at = [&](Eigen::Index i, double di, Eigen::Index j, double dj) {
    Eigen::VectorXd y = x;
    y[i] += di;
    y[j] += dj;
    return safe_eval(f, y, count);
  };
  Eigen::MatrixXd H(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double fp = at(i, h[i], i, 0.0);
    const double fm = at(i, -h[i], i, 0.0);
    H(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    for (Eigen::Index j = 0; j < i; ++j) {
      const double fpp = at(i, h[i], j, h[j]);
      const double fpm = at(i, h[i], j, -h[j]);
      const double fmp = at(i, -h[i], j, h[j]);
      const double fmm = at(i, -h[i], j, -h[j]);
      H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
    }
  }
  return H;
}

BfgsResult minimize_bfgs(const Objective& f, const Eigen::VectorXd& x0, const BfgsOptions& opts) {
  const Eigen::Index n = x0.size();
  BfgsResult res;
  res.x = x0;
  res.f = safe_eval(f, res.x, res.evaluations);
  if (!std::isfinite(res.f)) {
    res.message = "objective not finite at the starting point";
    return res;
  }
  if (n == 0) {
    res.grad = Eigen::VectorXd(0);
    res.converged = true;
    res.message = "no free parameters";
    return res;
  }
  res.grad = gradient(f, res.x, opts.fd_step, res.evaluations);
  Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(n, n);
  bool scaled = false;
  if (opts.inverse_hessian.rows() == n && opts.inverse_hessian.cols() == n) {
    Hinv = opts.inverse_hessian;
    scaled = true;
  }

  for (res.iterations = 0; res.iterations < opts.max_iter; ++res.iterations) {
    if (res.grad.cwiseAbs().maxCoeff() < opts.grad_tol) {
      res.converged = true;
      res.message = "gradient tolerance reached";
      res.inverse_hessian = Hinv;
      return res;
    }
    Eigen::VectorXd dir = -Hinv * res.grad;
    double slope = dir.dot(res.grad);
    if (slope >= 0.0) {
      Hinv.setIdentity();
      dir = -res.grad;
      slope = dir.dot(res.grad);
    }
    double t = 1.0;
    const double dmax = dir.cwiseAbs().maxCoeff();
    if (dmax * t > opts.max_step) t = opts.max_step / dmax;

    // Armijo backtracking.
    Eigen::VectorXd x_new;
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      x_new = res.x + t * dir;
      f_new = safe_eval(f, x_new, res.evaluations);
      if (std::isfinite(f_new) && f_new <= res.f + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (!Hinv.isIdentity()) {
        Hinv.setIdentity();
        scaled = false;
        continue;
      }
      res.message = "line search failed";
      res.inverse_hessian = Hinv;
      return res;
    }
    const Eigen::VectorXd g_new = gradient(f, x_new, opts.fd_step, res.evaluations);
    const Eigen::VectorXd s = x_new - res.x;
    const Eigen::VectorXd y = g_new - res.grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled) {
        Hinv *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      Hinv = (I - rho * s * y.transpose()) * Hinv * (I - rho * y * s.transpose()) +
             rho * s * s.transpose();
    }
    res.x = x_new;
    res.f = f_new;
    res.grad = g_new;
  }
  res.converged = res.grad.cwiseAbs().maxCoeff() < opts.grad_tol;
  res.message = res.converged ? "gradient tolerance reached" : "iteration limit reached";
  res.inverse_hessian = Hinv;
  return res;
}

}  // namespace cepfield::opt
