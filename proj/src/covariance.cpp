#include "cepfield/covariance.hpp"

#include <cmath>
#include <numbers>
#include <string>


#include "cepfield/errors.hpp"

namespace cepfield {

double NormalRng::uniform() {
  double u;
  do {
    u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  } while (u == 0.0);
  return u;
}

double NormalRng::normal() {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

Eigen::VectorXd NormalRng::normal_vector(Eigen::Index n) {
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = normal();
  return z;
}

BlockToeplitzCov BlockToeplitzCov::assemble(const AcfTable& acf, Eigen::Index n_rows,
                                            Eigen::Index n_cols) {
  if (acf.H < std::max(n_rows, n_cols) - 1)
    throw std::invalid_argument("acf window H=" + std::to_string(acf.H) + " too small for a " +
                                std::to_string(n_rows) + "x" + std::to_string(n_cols) +
                                " lattice");
  BlockToeplitzCov cov;
  cov.n_rows_ = n_rows;
  cov.n_cols_ = n_cols;
  const Eigen::Index n = n_rows * n_cols;
  cov.sigma_.resize(n, n);
  // Block (r, a) depends only on the row lag a - r.
  for (Eigen::Index r = 0; r < n_rows; ++r)
    for (Eigen::Index a = 0; a < n_rows; ++a) {
      const int h = static_cast<int>(a - r);
      for (Eigen::Index s = 0; s < n_cols; ++s)
        for (Eigen::Index b = 0; b < n_cols; ++b)
          cov.sigma_(r * n_cols + s, a * n_cols + b) = acf(h, static_cast<int>(b - s));
    }
  return cov;
}

BlockToeplitzCov BlockToeplitzCov::from_matrix(Eigen::MatrixXd sigma) {
  if (sigma.rows() != sigma.cols()) throw std::invalid_argument("covariance must be square");
  BlockToeplitzCov cov;
  cov.n_rows_ = sigma.rows();
  cov.n_cols_ = 1;
  cov.sigma_ = std::move(sigma);
  return cov;
}

namespace {

// Order of the first leading minor that is not positive, by an unblocked
// column Cholesky; zero when the matrix is positive definite.
std::size_t first_bad_minor(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double d = a(j, j) - a.row(j).head(j).squaredNorm();
    if (!(d > 0.0)) return static_cast<std::size_t>(j + 1);
    a(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i)
      a(i, j) = (a(i, j) - a.row(i).head(j).dot(a.row(j).head(j))) / a(j, j);
  }
  return 0;
}

}  // namespace

void BlockToeplitzCov::factor() {
  chol_ = sigma_;
  Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(chol_);
  if (llt.info() != Eigen::Success || !(chol_.diagonal().array() > 0.0).all()) {
    chol_.resize(0, 0);
    const std::size_t minor = first_bad_minor(sigma_);
    throw NotPositiveDefinite(minor ? minor : static_cast<std::size_t>(sigma_.rows()));
  }
  chol_.triangularView<Eigen::StrictlyUpper>().setZero();
  logdet_ = 2.0 * chol_.diagonal().array().log().sum();
  factored_ = true;
}

void BlockToeplitzCov::require_factor() const {
  if (!factored_) throw std::logic_error("covariance has not been factored");
}

void BlockToeplitzCov::check_dim(Eigen::Index n) const {
  if (n != sigma_.rows())
    throw std::invalid_argument("dimension mismatch: vector of length " + std::to_string(n) +
                                " for covariance of order " + std::to_string(sigma_.rows()));
}

const Eigen::MatrixXd& BlockToeplitzCov::chol() const {
  require_factor();
  return chol_;
}

double BlockToeplitzCov::logdet() const {
  require_factor();
  return logdet_;
}

Eigen::VectorXd BlockToeplitzCov::whiten(const Eigen::VectorXd& v) const {
  require_factor();
  check_dim(v.size());
  return chol_.triangularView<Eigen::Lower>().solve(v);
}

double BlockToeplitzCov::quad_form(const Eigen::VectorXd& v) const {
  return whiten(v).squaredNorm();
}

Eigen::VectorXd BlockToeplitzCov::correlate(const Eigen::VectorXd& z) const {
  require_factor();
  check_dim(z.size());
  return chol_.triangularView<Eigen::Lower>() * z;
}

Eigen::MatrixXd BlockToeplitzCov::solve(const Eigen::MatrixXd& b) const {
  require_factor();
  check_dim(b.rows());
  const Eigen::MatrixXd y = chol_.triangularView<Eigen::Lower>().solve(b);
  return chol_.triangularView<Eigen::Lower>().transpose().solve(y);
}

Eigen::VectorXd simulate(const BlockToeplitzCov& cov, const Eigen::VectorXd& mean, NormalRng& rng) {
  if (mean.size() != cov.dim()) throw std::invalid_argument("mean length does not match covariance");
  return mean + cov.correlate(rng.normal_vector(cov.dim()));
}

Eigen::VectorXd simulate(const BlockToeplitzCov& cov, const Eigen::VectorXd& mean, std::uint64_t seed) {
  NormalRng rng(seed);
  return simulate(cov, mean, rng);
}

}  // namespace cepfield
