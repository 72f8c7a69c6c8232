#include <doctest.h>

#include <cmath>

#include "cepfield/covariance.hpp"
#include "cepfield/errors.hpp"
#include "cepfield/lattice.hpp"
#include "oracles.hpp"

using namespace cepfield;

TEST_CASE("white acf assembles to the identity") {
  const BlockToeplitzCov c = BlockToeplitzCov::assemble(acf_exact(CepstralGrid(0), 3), 3, 4);
  CHECK(c.matrix() == Eigen::MatrixXd::Identity(12, 12));
}

TEST_CASE("two-site column lattice") {
  AcfTable t;
  t.H = 1;
  t.gamma = Eigen::MatrixXd::Zero(3, 3);
  t(0, 0) = 2.0;
  t(1, 0) = t(-1, 0) = 1.0;
  const BlockToeplitzCov c = BlockToeplitzCov::assemble(t, 2, 1);
  Eigen::Matrix2d ref;
  ref << 2, 1, 1, 2;
  CHECK(c.matrix() == ref);
  CHECK_THROWS(BlockToeplitzCov::assemble(t, 3, 1));
}

TEST_CASE("assembly matches the pair loop") {
  std::mt19937_64 rng(21);
  const CepstralGrid g = oracle::random_grid(2, 0.5, rng);
  const AcfTable t = acf_exact(g, 2);
  const BlockToeplitzCov c = BlockToeplitzCov::assemble(t, 3, 3);
  CHECK((c.matrix() - oracle::dense_covariance(t.gamma, 3, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("factorization") {
  BlockToeplitzCov id = BlockToeplitzCov::from_matrix(Eigen::MatrixXd::Identity(4, 4));
  id.factor();
  CHECK(id.chol() == Eigen::MatrixXd::Identity(4, 4));
  CHECK(id.logdet() == 0.0);

  Eigen::Matrix2d m;
  m << 4, 2, 2, 3;
  BlockToeplitzCov c = BlockToeplitzCov::from_matrix(m);
  c.factor();
  CHECK(c.logdet() == doctest::Approx(std::log(8.0)));

  std::mt19937_64 rng(22);
  BlockToeplitzCov r = BlockToeplitzCov::assemble(acf_exact(oracle::random_grid(2, 0.5, rng), 4), 5, 5);
  r.factor();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.matrix());
  CHECK(r.logdet() == doctest::Approx(es.eigenvalues().array().log().sum()).epsilon(1e-10));
}

TEST_CASE("non-PD input names the leading minor") {
  Eigen::Matrix3d m;
  m << 1, 0, 0, 0, 1, 2, 0, 2, 1;
  BlockToeplitzCov c = BlockToeplitzCov::from_matrix(m);
  try {
    c.factor();
    FAIL("factored");
  } catch (const NotPositiveDefinite& e) {
    CHECK(e.minor() == 3);
  }
}

TEST_CASE("solves") {
  std::mt19937_64 rng(23);
  BlockToeplitzCov c = BlockToeplitzCov::assemble(acf_exact(oracle::random_grid(1, 0.5, rng), 3), 4, 4);
  c.factor();
  NormalRng nr(1);
  const Eigen::VectorXd v = nr.normal_vector(16);
  const Eigen::MatrixXd inv = c.matrix().inverse();
  CHECK(c.quad_form(v) == doctest::Approx(v.dot(inv * v)).epsilon(1e-10));
  CHECK((c.correlate(c.whiten(v)) - v).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((c.solve(v) - inv * v).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("seeded simulation replays") {
  BlockToeplitzCov c = BlockToeplitzCov::assemble(acf_exact(CepstralGrid(1), 3), 4, 4);
  c.factor();
  const Eigen::VectorXd mean = Eigen::VectorXd::Zero(16);
  CHECK(simulate(c, mean, 42) == simulate(c, mean, 42));
  CHECK(simulate(c, mean, 42) != simulate(c, mean, 43));
}

TEST_CASE("white simulation has unit variance") {
  BlockToeplitzCov c = BlockToeplitzCov::assemble(acf_exact(CepstralGrid(0), 3), 4, 4);
  c.factor();
  NormalRng rng(8);
  const int n = 10000;
  Eigen::VectorXd ss = Eigen::VectorXd::Zero(16);
  for (int i = 0; i < n; ++i) ss += simulate(c, Eigen::VectorXd::Zero(16), rng).cwiseAbs2();
  CHECK(((ss / n).array() - 1.0).abs().maxCoeff() < 0.05);
}

TEST_CASE("whitened draws are uncorrelated") {
  CepstralGrid g(1);
  g.set(0, 1, 0.4);
  g.set(1, 1, 0.2);
  BlockToeplitzCov c = BlockToeplitzCov::assemble(acf_exact(g, 3), 4, 4);
  c.factor();
  NormalRng rng(9);
  const int n = 10000;
  double sxy = 0, sxx = 0, syy = 0, raw = 0;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd y = simulate(c, Eigen::VectorXd::Zero(16), rng);
    const Eigen::VectorXd z = c.whiten(y);
    sxy += z[5] * z[6];
    sxx += z[5] * z[5];
    syy += z[6] * z[6];
    raw += y[5] * y[6];
  }
  const double corr = sxy / std::sqrt(sxx * syy);
  CHECK(std::abs(corr) < 3.0 / std::sqrt(double(n)));
  CHECK(raw / n > 0.2);
}
