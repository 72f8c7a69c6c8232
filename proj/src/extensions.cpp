#include "cepfield/extensions.hpp"

#include <cmath>
#include <stdexcept>

#include "cepfield/covariance.hpp"
#include "cepfield/errors.hpp"

namespace cepfield {

SelectionMap::SelectionMap(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& observed)
    : observed_(observed) {
  for (Eigen::Index r = 0; r < observed_.rows(); ++r)
    for (Eigen::Index c = 0; c < observed_.cols(); ++c)
      if (observed_(r, c)) index_.push_back(r * observed_.cols() + c);
}

SelectionMap SelectionMap::all(Eigen::Index n_rows, Eigen::Index n_cols) {
  return SelectionMap(Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n_rows, n_cols, true));
}

SelectionMap SelectionMap::from_nan(const Eigen::MatrixXd& grid) {
  return SelectionMap(grid.array().isFinite().matrix());
}

Eigen::VectorXd SelectionMap::select(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out(count());
  for (Eigen::Index i = 0; i < count(); ++i) out[i] = v[index_[i]];
  return out;
}

Eigen::MatrixXd SelectionMap::contract(const Eigen::MatrixXd& a) const {
  return a(index_, index_);
}

Eigen::MatrixXd SelectionMap::select_rows(const Eigen::MatrixXd& a) const {
  return a(index_, Eigen::all);
}

Eigen::MatrixXd lattice_covariance(const CepstralGrid& grid, Eigen::Index n_rows,
                                   Eigen::Index n_cols, const AcfOptions& opts) {
  const int H = static_cast<int>(std::max(n_rows, n_cols)) - 1;
  return BlockToeplitzCov::assemble(model_acf(grid, H, opts), n_rows, n_cols).matrix();
}

namespace {

void check_shape(const LatticeSample& sample, const SelectionMap& selection) {
  if (selection.n_rows() != sample.n_rows() || selection.n_cols() != sample.n_cols())
    throw std::invalid_argument("selection map does not match the lattice");
  if (selection.count() == 0) throw Error("no observed cells");
}

// Y - X beta with missing entries left as they are; only observed ones are used.
Eigen::VectorXd observed_residual(const LatticeSample& sample, const SelectionMap& selection,
                                  const Eigen::VectorXd& beta) {
  return selection.select(sample.residual(beta));
}

}  // namespace

double missing_loglik(const LatticeSample& sample, const SelectionMap& selection,
                      const CepstralGrid& grid, const Eigen::VectorXd& beta,
                      const AcfOptions& opts) {
  check_shape(sample, selection);
  if (selection.complete()) return gaussian_loglik(sample, grid, beta, opts);
  BlockToeplitzCov cov = BlockToeplitzCov::from_matrix(
      selection.contract(lattice_covariance(grid, sample.n_rows(), sample.n_cols(), opts)));
  cov.factor();
  const Eigen::VectorXd z = observed_residual(sample, selection, beta);
  return -0.5 * cov.logdet() - 0.5 * cov.quad_form(z);
}

SignalExtraction extract_signal(const LatticeSample& sample, const SignalNoiseSpec& spec,
                                const SelectionMap& selection, const AcfOptions& opts) {
  check_shape(sample, selection);
  const Eigen::Index p = sample.n_regressors();
  if (spec.beta.size() != p) throw std::invalid_argument("beta does not match the design");
  if (!spec.mean_assignment.empty() && static_cast<Eigen::Index>(spec.mean_assignment.size()) != p)
    throw std::invalid_argument("mean_assignment needs one flag per design column");

  const Eigen::Index R = sample.n_rows();
  const Eigen::Index C = sample.n_cols();
  const Eigen::MatrixXd sig_s = lattice_covariance(spec.signal, R, C, opts);
  const Eigen::MatrixXd sig_n = lattice_covariance(spec.noise, R, C, opts);

  Eigen::VectorXd beta_s = Eigen::VectorXd::Zero(p);
  for (Eigen::Index j = 0; j < p; ++j)
    if (!spec.mean_assignment.empty() && spec.mean_assignment[j]) beta_s[j] = spec.beta[j];
  const Eigen::VectorXd signal_mean = sample.design() * beta_s;

  BlockToeplitzCov obs = BlockToeplitzCov::from_matrix(selection.contract(sig_s + sig_n));
  try {
    obs.factor();
  } catch (const NotPositiveDefinite& e) {
    throw Error("observed covariance is degenerate (leading minor " + std::to_string(e.minor()) + ")");
  }
  const Eigen::MatrixXd cross = selection.select_rows(sig_s);  // J Sigma_S
  const Eigen::VectorXd z = observed_residual(sample, selection, spec.beta);

  const Eigen::VectorXd mean = signal_mean + cross.transpose() * obs.solve(z);
  // Sigma_S - Sigma_S J' (J Sigma J')^{-1} J Sigma_S, via W = L^{-1} J Sigma_S.
  const Eigen::MatrixXd W = obs.chol().triangularView<Eigen::Lower>().solve(cross);

  SignalExtraction out;
  out.mean = devectorize(mean, R, C);
  Eigen::VectorXd var = sig_s.diagonal() - W.colwise().squaredNorm().transpose();
  out.std_error = devectorize(var.cwiseMax(0.0).cwiseSqrt(), R, C);
  if (sample.size() <= kDenseCovarianceLimit) {
    Eigen::MatrixXd cov = sig_s - W.transpose() * W;
    out.covariance = 0.5 * (cov + cov.transpose());
  }
  return out;
}

}  // namespace cepfield
