#pragma once

#include <cstdlib>

#include <Eigen/Dense>

#include "cepfield/grid.hpp"

namespace cepfield {

/// Spectral density on the (2M+1)^2 frequencies (pi u / M, pi v / M),
/// -M <= u, v <= M. The first index runs over the row-axis frequency.
struct SpectralMesh {
  int M = 0;
  Eigen::MatrixXd values;

  double at(int u, int v) const { return values(u + M, v + M); }
};

/// Autocovariances gamma_{h,k}, |h|, |k| <= H, h being the row lag.
struct AcfTable {
  int H = 0;
  Eigen::MatrixXd gamma;
  /// Set by the exact algorithm when the MA tails exceeded the tolerance.
  bool truncation_warning = false;

  double operator()(int h, int k) const { return gamma(h + H, k + H); }
  double& operator()(int h, int k) { return gamma(h + H, k + H); }
  /// Zero outside the stored window.
  double lag(int h, int k) const {
    return (std::abs(h) > H || std::abs(k) > H) ? 0.0 : (*this)(h, k);
  }
};

enum class MeshMethod {
  automatic,  // direct products for M <= 64, FFT above
  direct,     // E / G matrix products on the (2M+1)^2 mesh
  fft,        // 2M x 2M periodic transform
};

/**
 * Quadrature used to turn mesh values into autocovariances.
 *
 * `trapezoid` halves the weight of the duplicated +-pi rows and columns and
 * normalizes by (2M)^2; it equals the periodic 2M-point rule and converges
 * geometrically. `endpoint_inclusive` weights all (2M+1)^2 points by
 * (2M+1)^-2 and carries an O(1/M) error from counting +-pi twice.
 */
enum class QuadratureRule { trapezoid, endpoint_inclusive };

SpectralMesh spectrum_on_mesh(const CepstralGrid& grid, int M,
                              MeshMethod method = MeshMethod::automatic);

AcfTable acf_mesh(const CepstralGrid& grid, int M, int H,
                  QuadratureRule rule = QuadratureRule::trapezoid,
                  MeshMethod method = MeshMethod::automatic);

/// Moving-average coefficients of the causal (psi), skew (phi) and axis
/// (xi, omega) factors of the spectrum. psi(j,k) multiplies Z1^j Z2^k,
/// phi(j,k) multiplies Z1^-j Z2^k; indices run 0..K.
struct MaCoefficients {
  int K = 0;
  Eigen::MatrixXd psi;
  Eigen::MatrixXd phi;
  Eigen::VectorXd xi;
  Eigen::VectorXd omega;
  /// max |psi|, |phi| over j + k = K and |xi_K|, |omega_K|.
  double tail = 0.0;
  bool tail_ok = true;
};

inline constexpr int kDefaultTruncation = 25;
inline constexpr double kDefaultTailTolerance = 1e-12;

MaCoefficients cepstral_to_ma(const CepstralGrid& grid, int K,
                              double tail_tolerance = kDefaultTailTolerance);

/// Autocovariances of the four MA factors. The 2D tables are indexed
/// (r + K, s + K) for |r|, |s| <= K in each factor's own coordinates; the
/// 1D tables (h + K).
struct MaAcfs {
  int K = 0;
  Eigen::MatrixXd psi;
  Eigen::MatrixXd phi;
  Eigen::VectorXd xi;
  Eigen::VectorXd omega;
};

MaAcfs ma_acf(const MaCoefficients& ma);

AcfTable acf_exact(const CepstralGrid& grid, int H, int K = kDefaultTruncation,
                   double tail_tolerance = kDefaultTailTolerance);

inline CepstralGrid negate(const CepstralGrid& grid) { return grid.negated(); }

}  // namespace cepfield
