#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "cepfield/estimation.hpp"

namespace cepfield {

struct InfoCriteria {
  std::size_t k = 0;
  std::size_t n = 0;
  double neg_log_lik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  double hq = 0.0;
};

InfoCriteria info_criteria(double neg_log_lik, std::size_t k, std::size_t n);
/// k = free cepstral coefficients + regressors, n = lattice size.
InfoCriteria info_criteria(const FitResult& fit, const LatticeSample& sample);

/// Moran's I with binary rook (4-neighbour) weights and the normality-null
/// variance. The two-sided p-value comes from the normal approximation, or
/// from `permutations` random relabellings when that is non-zero.
struct MoranResult {
  double i_stat = 0.0;
  double expected = 0.0;
  double variance = 0.0;
  double z = 0.0;
  double p_value = 1.0;
};

MoranResult morans_i(const Eigen::MatrixXd& values, int permutations = 0, std::uint64_t seed = 1);

struct Residuals {
  Eigen::MatrixXd grid;  // L^{-1}(Y - X beta), devectorized
  MoranResult moran;
};

Residuals residuals(const FitResult& fit, const LatticeSample& sample, const AcfOptions& opts = {});

}  // namespace cepfield
