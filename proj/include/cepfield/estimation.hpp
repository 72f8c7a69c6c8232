#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cepfield/grid.hpp"
#include "cepfield/lattice.hpp"
#include "cepfield/objectives.hpp"

namespace cepfield {

enum class Method { mle, qmle_exact, qmle_approx, bayes };

Method parse_method(std::string_view name);
std::string_view to_string(Method m);

struct FitOptions {
  AcfOptions acf;
  /// Mesh order of the approximate Whittle criterion; 0 = max(n_rows, n_cols).
  int whittle_mesh = 0;
  /// Sample autocovariance estimate used by the Whittle criteria.
  AcfEstimate acf_estimate = AcfEstimate::unbiased;
  double grad_tol = 1e-4;
  double outer_tol = 1e-6;
  double fd_step = 1e-5;
  double hessian_step = 1e-4;
  int max_outer = 25;
  int max_iter = 500;
  bool standard_errors = true;
};

struct IterationRecord {
  int outer = 0;
  int inner_iterations = 0;
  double objective = 0.0;  // after the theta step
  double change = 0.0;     // max |delta| over theta and beta
};

struct FitResult {
  CepstralGrid grid;        // estimated coefficients, carries the mask
  Eigen::VectorXd theta;    // free coefficients in canonical order
  Eigen::VectorXd beta;
  double objective = 0.0;   // minimized criterion
  double loglik = 0.0;      // Gaussian log-likelihood at the estimates
  Method method = Method::mle;
  Eigen::VectorXd se_theta;
  Eigen::VectorXd se_beta;
  Eigen::MatrixXd hessian;  // observed, over (theta, beta)
  std::vector<IterationRecord> trace;
  bool converged = false;
  std::vector<std::string> warnings;

  std::size_t parameter_count() const {
    return static_cast<std::size_t>(theta.size() + beta.size());
  }
};

/// The criterion minimized by `method` as a function of (free theta, beta).
/// For mle it is -loglik; for the Whittle methods it is (n/2) times the
/// criterion.
class FitObjective {
 public:
  FitObjective(const LatticeSample& sample, CepstralGrid structure, Method method,
               const FitOptions& opts);

  double operator()(const Eigen::VectorXd& theta, const Eigen::VectorXd& beta) const;
  /// Unscaled criterion value (-loglik, KL-hat or KL-hat_N).
  double criterion(const Eigen::VectorXd& theta, const Eigen::VectorXd& beta) const;
  Eigen::VectorXd update_beta(const Eigen::VectorXd& theta) const;
  double scale() const { return scale_; }
  CepstralGrid grid_at(const Eigen::VectorXd& theta) const;

 private:
  const LatticeSample& sample_;
  CepstralGrid structure_;
  Method method_;
  FitOptions opts_;
  double scale_ = 1.0;
};

/// Alternates a quasi-Newton theta step at fixed beta with the matching GLS
/// beta update until the joint change falls below opts.outer_tol. The
/// structure grid supplies the order and the zero mask; its values are
/// ignored (theta starts at white noise, beta at OLS).
FitResult fit(const LatticeSample& sample, const CepstralGrid& structure, Method method,
              const FitOptions& opts = {});

struct StandardErrors {
  Eigen::VectorXd theta;
  Eigen::VectorXd beta;
  Eigen::MatrixXd hessian;
};

/// Square roots of the diagonal of the inverse observed Hessian of the
/// scaled criterion. Throws when the Hessian is not positive definite.
StandardErrors standard_errors(const FitResult& fit, const LatticeSample& sample,
                               const FitOptions& opts = {});

struct McmcConfig {
  int n_iter = 20000;
  int burn_in = 5000;
  double proposal_scale = 0.1;
  double prior_sd = 10.0;
  std::uint64_t seed = 1;
  /// Proposal covariance over (theta, beta); identity when absent.
  std::optional<Eigen::MatrixXd> proposal_cov;
  /// Starting point over (theta, beta); white noise and OLS when absent.
  std::optional<Eigen::VectorXd> start;
  AcfOptions acf;
};

struct McmcResult {
  FitResult fit;                // posterior means; se_* hold posterior sds
  Eigen::MatrixXd draws;        // post burn-in, columns (theta, beta)
  double acceptance_rate = 0.0;
};

McmcResult mcmc_fit(const LatticeSample& sample, const CepstralGrid& structure,
                    const McmcConfig& config);

struct LrTest {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Likelihood-ratio test of a nested cepstral model; both fits by mle on
/// the same data.
LrTest lr_test(const FitResult& full, const FitResult& nested);

/// Masks non-origin coefficients with |theta| < threshold * se and refits.
FitResult backward_delete(const LatticeSample& sample, const FitResult& fit,
                          const FitOptions& opts = {}, double threshold = 2.0);

}  // namespace cepfield
