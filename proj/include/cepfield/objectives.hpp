#pragma once

#include <string_view>

#include <Eigen/Dense>

#include "cepfield/cepstral_model.hpp"
#include "cepfield/covariance.hpp"
#include "cepfield/lattice.hpp"

namespace cepfield {

enum class AcfMethod { mesh, exact };

/// How model autocovariances are computed inside the objectives.
struct AcfOptions {
  AcfMethod method = AcfMethod::mesh;
  int mesh_order = 200;
  int truncation = kDefaultTruncation;
  QuadratureRule rule = QuadratureRule::trapezoid;
};

/// Model acf on lags |h|, |k| <= H.
AcfTable model_acf(const CepstralGrid& grid, int H, const AcfOptions& opts = {});

/// Factored Sigma(F_theta) for the sample's lattice.
BlockToeplitzCov model_covariance(const CepstralGrid& grid, Eigen::Index n_rows,
                                  Eigen::Index n_cols, const AcfOptions& opts = {});

enum class ObjectiveKind { gaussian_loglik, whittle_exact, whittle_approx };
std::string_view to_string(ObjectiveKind k);

struct ObjectiveValue {
  double value = 0.0;
  ObjectiveKind kind = ObjectiveKind::gaussian_loglik;
  Eigen::VectorXd theta;
  Eigen::VectorXd beta;
};

/// -.5 log|Sigma| - .5 (Y - X beta)' Sigma^{-1} (Y - X beta), no constant.
double gaussian_loglik(const LatticeSample& sample, const CepstralGrid& grid,
                       const Eigen::VectorXd& beta, const AcfOptions& opts = {});
double gaussian_loglik(const LatticeSample& sample, const BlockToeplitzCov& factored_cov,
                       const Eigen::VectorXd& beta);

/// Theta_00 + sum over all observed lags of gamma-hat_h * gamma_h(F_{-theta}).
double whittle_exact(const SampleAcf& acf, const CepstralGrid& grid, const AcfOptions& opts = {},
                     AcfEstimate which = AcfEstimate::unbiased);

/**
 * Mean of log F + I-hat / F over the (2M+1)^2 mesh (pi u / M, pi v / M),
 * -M <= u, v <= M. The sum is divided by the number of mesh points, so the
 * criterion tends to whittle_exact as M grows; M = 0 selects
 * max(n_rows, n_cols).
 */
double whittle_approx(const SampleAcf& acf, const CepstralGrid& grid, int M = 0,
                      AcfEstimate which = AcfEstimate::unbiased);

enum class GlsMode { mle, qmle };

/// GLS regression estimate weighted by Sigma^{-1}(F_theta) (mle) or by
/// Sigma(F_{-theta}) (qmle).
Eigen::VectorXd gls_beta(const LatticeSample& sample, const CepstralGrid& grid, GlsMode mode,
                         const AcfOptions& opts = {});
Eigen::VectorXd gls_beta(const LatticeSample& sample, const BlockToeplitzCov& factored_cov);

/// <log F_A + F_B / F_A> by trapezoid quadrature on the order-M mesh.
double kl_divergence(const CepstralGrid& a, const CepstralGrid& b, int M);

/// Mean of f over the mesh with half weights on the +-pi rows and columns.
double mesh_average(const Eigen::MatrixXd& values);

}  // namespace cepfield
