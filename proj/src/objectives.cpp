#include "cepfield/objectives.hpp"

#include <string>

#include "cepfield/errors.hpp"

namespace cepfield {

std::string_view to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::gaussian_loglik: return "gaussian_loglik";
    case ObjectiveKind::whittle_exact: return "whittle_exact";
    case ObjectiveKind::whittle_approx: return "whittle_approx";
  }
  return "?";
}

AcfTable model_acf(const CepstralGrid& grid, int H, const AcfOptions& opts) {
  if (opts.method == AcfMethod::exact) return acf_exact(grid, H, opts.truncation);
  return acf_mesh(grid, opts.mesh_order, H, opts.rule);
}

BlockToeplitzCov model_covariance(const CepstralGrid& grid, Eigen::Index n_rows,
                                  Eigen::Index n_cols, const AcfOptions& opts) {
  const int H = static_cast<int>(std::max(n_rows, n_cols)) - 1;
  BlockToeplitzCov cov = BlockToeplitzCov::assemble(model_acf(grid, H, opts), n_rows, n_cols);
  cov.factor();
  return cov;
}

double gaussian_loglik(const LatticeSample& sample, const BlockToeplitzCov& cov,
                       const Eigen::VectorXd& beta) {
  return -0.5 * cov.logdet() - 0.5 * cov.quad_form(sample.residual(beta));
}

double gaussian_loglik(const LatticeSample& sample, const CepstralGrid& grid,
                       const Eigen::VectorXd& beta, const AcfOptions& opts) {
  return gaussian_loglik(sample, model_covariance(grid, sample.n_rows(), sample.n_cols(), opts),
                         beta);
}

double whittle_exact(const SampleAcf& acf, const CepstralGrid& grid, const AcfOptions& opts,
                     AcfEstimate which) {
  const int H1 = acf.max_row_lag();
  const int H2 = acf.max_col_lag();
  const AcfTable inverse = model_acf(grid.negated(), std::max(H1, H2), opts);
  const Eigen::MatrixXd& g = which == AcfEstimate::unbiased ? acf.unbiased : acf.biased;
  double sum = 0.0;
  for (int h = -H1; h <= H1; ++h)
    for (int k = -H2; k <= H2; ++k) sum += g(h + H1, k + H2) * inverse(h, k);
  return grid(0, 0) + sum;
}

double mesh_average(const Eigen::MatrixXd& values) {
  const Eigen::Index w = values.rows();
  Eigen::VectorXd weight = Eigen::VectorXd::Ones(w);
  weight[0] = weight[w - 1] = 0.5;
  const double norm = static_cast<double>(w - 1) * static_cast<double>(w - 1);
  return weight.dot(values * weight) / norm;
}

double whittle_approx(const SampleAcf& acf, const CepstralGrid& grid, int M, AcfEstimate which) {
  if (M == 0) M = static_cast<int>(std::max(acf.n_rows, acf.n_cols));
  const SpectralMesh f = spectrum_on_mesh(grid, M);
  const Eigen::MatrixXd I = periodogram_ft(acf, M, which);
  const Eigen::ArrayXXd terms = f.values.array().log() + I.array() / f.values.array();
  return terms.sum() / static_cast<double>(terms.size());
}

namespace {

Eigen::VectorXd solve_normal_equations(const Eigen::MatrixXd& xtwx, const Eigen::VectorXd& xtwy) {
  Eigen::LLT<Eigen::MatrixXd> llt(xtwx);
  if (llt.info() != Eigen::Success) throw Error("singular GLS normal equations");
  const Eigen::VectorXd d = llt.matrixL().toDenseMatrix().diagonal();
  if (d.minCoeff() <= 1e-12 * d.maxCoeff()) throw Error("singular GLS normal equations");
  return llt.solve(xtwy);
}

}  // namespace

Eigen::VectorXd gls_beta(const LatticeSample& sample, const BlockToeplitzCov& cov) {
  const Eigen::MatrixXd& X = sample.design();
  if (X.cols() == 0) return Eigen::VectorXd(0);
  const Eigen::MatrixXd lx = cov.chol().triangularView<Eigen::Lower>().solve(X);
  const Eigen::VectorXd ly = cov.whiten(sample.y());
  return solve_normal_equations(lx.transpose() * lx, lx.transpose() * ly);
}

Eigen::VectorXd gls_beta(const LatticeSample& sample, const CepstralGrid& grid, GlsMode mode,
                         const AcfOptions& opts) {
  const Eigen::MatrixXd& X = sample.design();
  if (X.cols() == 0) return Eigen::VectorXd(0);
  if (mode == GlsMode::mle)
    return gls_beta(sample, model_covariance(grid, sample.n_rows(), sample.n_cols(), opts));
  const int H = static_cast<int>(std::max(sample.n_rows(), sample.n_cols())) - 1;
  const BlockToeplitzCov weight =
      BlockToeplitzCov::assemble(model_acf(grid.negated(), H, opts), sample.n_rows(), sample.n_cols());
  const Eigen::MatrixXd wx = weight.matrix() * X;
  return solve_normal_equations(X.transpose() * wx, wx.transpose() * sample.y());
}

double kl_divergence(const CepstralGrid& a, const CepstralGrid& b, int M) {
  const SpectralMesh fa = spectrum_on_mesh(a, M);
  const SpectralMesh fb = spectrum_on_mesh(b, M);
  const Eigen::MatrixXd terms =
      (fa.values.array().log() + fb.values.array() / fa.values.array()).matrix();
  return mesh_average(terms);
}

}  // namespace cepfield
