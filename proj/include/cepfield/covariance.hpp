#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include <Eigen/Dense>

#include "cepfield/cepstral_model.hpp"

namespace cepfield {

/**
 * Standard normal draws with a fixed, portable algorithm: std::mt19937_64
 * supplies 53-bit uniforms, and the Box-Muller transform turns consecutive
 * uniform pairs into normal pairs. Identical seeds replay identical streams
 * on every platform.
 */
class NormalRng {
 public:
  explicit NormalRng(std::uint64_t seed) : engine_(seed) {}

  double uniform();  // in (0, 1)
  double normal();
  Eigen::VectorXd normal_vector(Eigen::Index n);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/**
 * Covariance of a lexicographically vectorized stationary lattice field:
 * entry ((r,s),(a,b)) is gamma_{a-r, b-s}. Row-lag blocks are Toeplitz in
 * the column lag.
 */
class BlockToeplitzCov {
 public:
  static BlockToeplitzCov assemble(const AcfTable& acf, Eigen::Index n_rows, Eigen::Index n_cols);
  /// Wraps an explicit covariance matrix over an arbitrary set of sites.
  static BlockToeplitzCov from_matrix(Eigen::MatrixXd sigma);

  Eigen::Index n_rows() const { return n_rows_; }
  Eigen::Index n_cols() const { return n_cols_; }
  Eigen::Index dim() const { return sigma_.rows(); }
  const Eigen::MatrixXd& matrix() const { return sigma_; }

  /// Lower Cholesky factor; throws NotPositiveDefinite with the failing
  /// leading minor.
  void factor();
  bool factored() const { return factored_; }
  const Eigen::MatrixXd& chol() const;
  double logdet() const;

  /// v' Sigma^{-1} v
  double quad_form(const Eigen::VectorXd& v) const;
  /// L^{-1} v, white when v ~ N(0, Sigma).
  Eigen::VectorXd whiten(const Eigen::VectorXd& v) const;
  /// L z, the inverse of whiten.
  Eigen::VectorXd correlate(const Eigen::VectorXd& z) const;
  /// Sigma^{-1} B
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;

 private:
  void require_factor() const;
  void check_dim(Eigen::Index n) const;

  Eigen::Index n_rows_ = 0;
  Eigen::Index n_cols_ = 0;
  Eigen::MatrixXd sigma_;
  Eigen::MatrixXd chol_;
  double logdet_ = 0.0;
  bool factored_ = false;
};

/// mean + L eps with eps standard normal from the seeded generator.
Eigen::VectorXd simulate(const BlockToeplitzCov& cov, const Eigen::VectorXd& mean, std::uint64_t seed);
Eigen::VectorXd simulate(const BlockToeplitzCov& cov, const Eigen::VectorXd& mean, NormalRng& rng);

}  // namespace cepfield
