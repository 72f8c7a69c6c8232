#include "cepfield/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cepfield/covariance.hpp"
#include "cepfield/errors.hpp"

namespace cepfield {

InfoCriteria info_criteria(double neg_log_lik, std::size_t k, std::size_t n) {
  InfoCriteria c;
  c.k = k;
  c.n = n;
  c.neg_log_lik = neg_log_lik;
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);
  c.aic = 2.0 * kd + 2.0 * neg_log_lik;
  c.bic = kd * std::log(nd) + 2.0 * neg_log_lik;
  c.hq = 2.0 * kd * std::log(std::log(nd)) + 2.0 * neg_log_lik;
  return c;
}

InfoCriteria info_criteria(const FitResult& fit, const LatticeSample& sample) {
  return info_criteria(-fit.loglik, fit.parameter_count(), static_cast<std::size_t>(sample.size()));
}

namespace {

// z' W z for rook adjacency, each unordered pair counted twice.
double rook_cross(const Eigen::MatrixXd& z) {
  double acc = 0.0;
  for (Eigen::Index r = 0; r < z.rows(); ++r)
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
      if (r + 1 < z.rows()) acc += z(r, c) * z(r + 1, c);
      if (c + 1 < z.cols()) acc += z(r, c) * z(r, c + 1);
    }
  return 2.0 * acc;
}

}  // namespace

MoranResult morans_i(const Eigen::MatrixXd& values, int permutations, std::uint64_t seed) {
  const Eigen::Index R = values.rows();
  const Eigen::Index C = values.cols();
  const double n = static_cast<double>(values.size());
  if (values.size() < 3) throw std::invalid_argument("Moran's I needs at least 3 cells");

  const Eigen::MatrixXd z = values.array() - values.mean();
  const double zz = z.squaredNorm();
  if (!(zz > 0.0)) throw Error("Moran's I is undefined for constant input");

  // Binary symmetric weights: S0 = sum w, S1 = 2 S0, S2 = sum (2 deg_i)^2.
  double s0 = 0.0;
  double s2 = 0.0;
  for (Eigen::Index r = 0; r < R; ++r)
    for (Eigen::Index c = 0; c < C; ++c) {
      const int deg = (r > 0) + (r + 1 < R) + (c > 0) + (c + 1 < C);
      s0 += deg;
      s2 += 4.0 * deg * deg;
    }
  if (s0 == 0.0) throw std::invalid_argument("lattice has no rook neighbours");
  const double s1 = 2.0 * s0;

  MoranResult m;
  m.i_stat = (n / s0) * rook_cross(z) / zz;
  m.expected = -1.0 / (n - 1.0);
  m.variance = (n * n * s1 - n * s2 + 3.0 * s0 * s0) / ((n * n - 1.0) * s0 * s0) -
               m.expected * m.expected;
  m.z = (m.i_stat - m.expected) / std::sqrt(m.variance);

  if (permutations <= 0) {
    m.p_value = std::erfc(std::abs(m.z) / std::sqrt(2.0));
    return m;
  }
  NormalRng rng(seed);
  std::vector<double> cells(z.data(), z.data() + z.size());
  const double observed = std::abs(m.i_stat - m.expected);
  int extreme = 0;
  for (int b = 0; b < permutations; ++b) {
    for (std::size_t i = cells.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i + 1));
      std::swap(cells[i], cells[std::min(j, i)]);
    }
    const Eigen::Map<const Eigen::MatrixXd> perm(cells.data(), R, C);
    const double ib = (n / s0) * rook_cross(perm) / zz;
    if (std::abs(ib - m.expected) >= observed) ++extreme;
  }
  m.p_value = (extreme + 1.0) / (permutations + 1.0);
  return m;
}

Residuals residuals(const FitResult& fit, const LatticeSample& sample, const AcfOptions& opts) {
  const BlockToeplitzCov cov = model_covariance(fit.grid, sample.n_rows(), sample.n_cols(), opts);
  Residuals out;
  out.grid = devectorize(cov.whiten(sample.residual(fit.beta)), sample.n_rows(), sample.n_cols());
  out.moran = morans_i(out.grid);
  return out;
}

}  // namespace cepfield
