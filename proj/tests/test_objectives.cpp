#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cepfield/objectives.hpp"
#include "oracles.hpp"

using namespace cepfield;
using std::numbers::pi;

namespace {

LatticeSample random_sample(int R, int C, DesignSpec d, std::uint64_t seed) {
  NormalRng rng(seed);
  return LatticeSample(devectorize(rng.normal_vector(R * C), R, C), d);
}

// <log F + I/F> by the (2M)^2 periodic rule with direct evaluation of both terms.
double whittle_quadrature(const SampleAcf& a, const CepstralGrid& g, int M) {
  double s = 0.0;
  for (int u = 0; u < 2 * M; ++u)
    for (int v = 0; v < 2 * M; ++v) {
      const double l1 = pi * u / M, l2 = pi * v / M;
      double I = 0.0;
      for (int h = -a.max_row_lag(); h <= a.max_row_lag(); ++h)
        for (int k = -a.max_col_lag(); k <= a.max_col_lag(); ++k)
          I += a.unbiased_at(h, k) * std::cos(h * l1 + k * l2);
      const double lf = oracle::log_spectrum(g, l1, l2);
      s += lf + I * std::exp(-lf);
    }
  return s / (4.0 * M * M);
}

}  // namespace

TEST_CASE("scalar Gaussian likelihood") {
  const double c = 0.6, mu = 2.0, w = -0.7;
  CepstralGrid g(0);
  g.set(0, 0, c);
  const LatticeSample s(Eigen::MatrixXd::Constant(1, 1, w + mu), DesignSpec::constant);
  Eigen::VectorXd beta(1);
  beta << mu;
  CHECK(gaussian_loglik(s, g, beta) == doctest::Approx(-0.5 * c - 0.5 * w * w * std::exp(-c)).epsilon(1e-13));
}

TEST_CASE("likelihood matches the dense multivariate normal") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 4; ++rep) {
    const CepstralGrid g = oracle::random_grid(2, 0.4, rng);
    const LatticeSample s = random_sample(4, 4, DesignSpec::constant_rowcol, 100 + rep);
    const Eigen::Vector3d beta(0.3, -0.1, 0.2);
    const Eigen::MatrixXd S = oracle::dense_covariance(oracle::acf_by_quadrature(g, 3), 4, 4);
    const double ref = oracle::mvn_loglik(S, s.y() - s.design() * beta);
    CHECK(gaussian_loglik(s, g, beta) == doctest::Approx(ref).epsilon(1e-10));
    AcfOptions ex;
    ex.method = AcfMethod::exact;
    CHECK(gaussian_loglik(s, g, beta, ex) == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("exact Whittle closed forms") {
  const LatticeSample s = random_sample(5, 6, DesignSpec::constant, 3);
  const SampleAcf a = sample_acf(s, s.ols_beta());
  CHECK(whittle_exact(a, CepstralGrid(1)) == doctest::Approx(a.unbiased_at(0, 0)).epsilon(1e-12));
  const double c = 0.4;
  CepstralGrid g(1);
  g.set(0, 0, c);
  CHECK(whittle_exact(a, g) == doctest::Approx(c + std::exp(-c) * a.unbiased_at(0, 0)).epsilon(1e-12));
}

TEST_CASE("exact Whittle equals the quadrature of the spectral form") {
  std::mt19937_64 rng(32);
  for (int rep = 0; rep < 3; ++rep) {
    const CepstralGrid g = oracle::random_grid(1, 0.4, rng);
    const LatticeSample s = random_sample(6, 6, DesignSpec::constant, 40 + rep);
    const SampleAcf a = sample_acf(s, s.ols_beta());
    CHECK(std::abs(whittle_exact(a, g) - whittle_quadrature(a, g, 48)) < 1e-10);
  }
}

TEST_CASE("approximate Whittle closed forms") {
  const LatticeSample s = random_sample(5, 5, DesignSpec::constant, 4);
  const SampleAcf a = sample_acf(s, s.ols_beta());
  const Eigen::MatrixXd I = periodogram_ft(a, 5);
  CHECK(whittle_approx(a, CepstralGrid(1)) == doctest::Approx(I.mean()).epsilon(1e-12));

  SampleAcf flat = sample_acf(Eigen::MatrixXd::Zero(3, 3));
  flat.unbiased(2, 2) = 1.7;
  CepstralGrid g(0);
  g.set(0, 0, -0.3);
  CHECK(whittle_approx(flat, g, 6) == doctest::Approx(-0.3 + 1.7 * std::exp(0.3)).epsilon(1e-12));
}

TEST_CASE("approximate Whittle converges at rate 1/M") {
  std::mt19937_64 rng(33);
  const CepstralGrid g = oracle::random_grid(1, 0.4, rng);
  const LatticeSample s = random_sample(8, 8, DesignSpec::constant, 5);
  const SampleAcf a = sample_acf(s, s.ols_beta());
  const double ex = whittle_exact(a, g);
  const double e1 = std::abs(whittle_approx(a, g, 16) - ex);
  const double e2 = std::abs(whittle_approx(a, g, 32) - ex);
  CHECK(e1 / e2 > 1.6);
  CHECK(e1 / e2 < 2.4);
}

TEST_CASE("GLS reduces to least squares for white noise") {
  const LatticeSample s = random_sample(4, 5, DesignSpec::constant, 6);
  for (GlsMode m : {GlsMode::mle, GlsMode::qmle})
    CHECK(gls_beta(s, CepstralGrid(1), m)[0] == doctest::Approx(s.y().mean()).epsilon(1e-12));

  Design d;
  d.X = Eigen::MatrixXd(20, 2);
  for (int i = 0; i < 20; ++i) {
    d.X(i, 0) = 1.0;
    d.X(i, 1) = i - 9.5;
  }
  d.names = {"a", "b"};
  NormalRng rng(7);
  const LatticeSample o(devectorize(rng.normal_vector(20), 4, 5), d);
  const Eigen::VectorXd b = gls_beta(o, CepstralGrid(0), GlsMode::mle);
  CHECK(b[0] == doctest::Approx(d.X.col(0).dot(o.y()) / 20).epsilon(1e-12));
  CHECK(b[1] == doctest::Approx(d.X.col(1).dot(o.y()) / d.X.col(1).squaredNorm()).epsilon(1e-12));
}

TEST_CASE("GLS matches dense oracles") {
  std::mt19937_64 rng(34);
  const CepstralGrid g = oracle::random_grid(2, 0.4, rng);
  const LatticeSample s = random_sample(5, 5, DesignSpec::constant_rowcol, 8);
  const Eigen::MatrixXd& X = s.design();
  const Eigen::MatrixXd S = oracle::dense_covariance(oracle::acf_by_quadrature(g, 4), 5, 5);
  const Eigen::MatrixXd Si = S.inverse();
  const Eigen::VectorXd mle = (X.transpose() * Si * X).ldlt().solve(X.transpose() * Si * s.y());
  CHECK((gls_beta(s, g, GlsMode::mle) - mle).cwiseAbs().maxCoeff() < 1e-8);
  const Eigen::MatrixXd Sn = oracle::dense_covariance(oracle::acf_by_quadrature(g.negated(), 4), 5, 5);
  const Eigen::VectorXd qm = (X.transpose() * Sn * X).ldlt().solve(X.transpose() * Sn * s.y());
  CHECK((gls_beta(s, g, GlsMode::qmle) - qm).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("KL discrepancy") {
  std::mt19937_64 rng(35);
  const CepstralGrid g = oracle::random_grid(2, 0.5, rng);
  CHECK(kl_divergence(g, g, 30) == doctest::Approx(g(0, 0) + 1.0).epsilon(1e-12));
  for (double c : {-0.5, 0.0, 0.8}) {
    CepstralGrid a(0);
    a.set(0, 0, c);
    CHECK(kl_divergence(a, CepstralGrid(0), 8) == doctest::Approx(c + std::exp(-c)).epsilon(1e-13));
  }
}
