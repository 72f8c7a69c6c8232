#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "cepfield/covariance.hpp"
#include "cepfield/errors.hpp"
#include "cepfield/lattice.hpp"

using namespace cepfield;

TEST_CASE("vectorization is row-major") {
  Eigen::MatrixXd g(2, 2);
  g << 1, 2, 3, 4;
  const Eigen::VectorXd y = vectorize(g);
  CHECK(y == Eigen::Vector4d(1, 2, 3, 4));
  CHECK(devectorize(y, 2, 2) == g);
  CHECK(lex_index(2, 1, 2) == 3);
}

TEST_CASE("designs") {
  const Design d = make_design(2, 2, DesignSpec::constant_rowcol);
  Eigen::MatrixXd ref(4, 3);
  ref << 1, 1, 1, 1, 1, 2, 1, 2, 1, 1, 2, 2;
  CHECK(d.X == ref);
  CHECK(make_design(3, 3, DesignSpec::none).X.cols() == 0);
  CHECK(parse_design("constant+rowcol") == DesignSpec::constant_rowcol);
  CHECK_THROWS(parse_design("quadratic"));
}

TEST_CASE("csv loading") {
  std::stringstream ss("1,2\n3,4\n");
  const Eigen::MatrixXd g = read_csv_grid(ss);
  const LatticeSample s(g, DesignSpec::constant);
  CHECK(s.y() == Eigen::Vector4d(1, 2, 3, 4));
  CHECK(s.design() == Eigen::MatrixXd::Ones(4, 1));

  std::stringstream hdr("a,b\n1,2\n3,4\n");
  CHECK(read_csv_grid(hdr).rows() == 2);
}

TEST_CASE("csv errors carry positions") {
  std::stringstream ragged("1,2\n3\n");
  try {
    read_csv_grid(ragged);
    FAIL("no error");
  } catch (const LoadError& e) {
    CHECK(e.row() == 2);
  }
  std::stringstream bad("1,2\n3,x\n");
  try {
    read_csv_grid(bad);
    FAIL("no error");
  } catch (const LoadError& e) {
    CHECK(e.row() == 2);
    CHECK(e.col() == 2);
  }
  std::stringstream missing("1,NA\nnan,4\n");
  const Eigen::MatrixXd m = read_csv_grid(missing);
  CHECK(std::isnan(m(0, 1)));
  CHECK(std::isnan(m(1, 0)));
  CHECK(m(1, 1) == 4.0);
  std::stringstream empty("");
  CHECK_THROWS_AS(read_csv_grid(empty), LoadError);
}

TEST_CASE("rank-deficient design is rejected") {
  Design d;
  d.X = Eigen::MatrixXd::Ones(4, 2);
  d.names = {"a", "b"};
  CHECK_THROWS(LatticeSample(Eigen::MatrixXd::Zero(2, 2), d));
}

TEST_CASE("sample acf of a constant field at the true mean is zero") {
  const LatticeSample s(Eigen::MatrixXd::Constant(4, 5, 3.5), DesignSpec::constant);
  Eigen::VectorXd beta(1);
  beta << 3.5;
  const SampleAcf a = sample_acf(s, beta);
  CHECK(a.biased.cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.unbiased.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sample acf of a unit impulse") {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4, 5);
  g(0, 0) = 1.0;
  const SampleAcf a = sample_acf(g);
  CHECK(a.biased_at(0, 0) == doctest::Approx(1.0 / 20));
  CHECK(a.biased.sum() == doctest::Approx(1.0 / 20));
  CHECK(a.unbiased_at(0, 0) == doctest::Approx(1.0 / 20));
}

TEST_CASE("sample acf against direct sums") {
  NormalRng rng(4);
  const Eigen::MatrixXd g = devectorize(rng.normal_vector(12), 3, 4);
  const SampleAcf a = sample_acf(g);
  for (int h = -2; h <= 2; ++h)
    for (int k = -3; k <= 3; ++k) {
      double s = 0.0;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c)
          if (r + h >= 0 && r + h < 3 && c + k >= 0 && c + k < 4) s += g(r, c) * g(r + h, c + k);
      CHECK(a.biased_at(h, k) == doctest::Approx(s / 12).epsilon(1e-13));
      CHECK(a.unbiased_at(h, k) == doctest::Approx(s / ((3 - std::abs(h)) * (4 - std::abs(k)))).epsilon(1e-13));
    }
}

TEST_CASE("unbiased sample acf of white noise") {
  const int reps = 500;
  double m00 = 0, s00 = 0, m23 = 0, s23 = 0;
  NormalRng rng(77);
  for (int r = 0; r < reps; ++r) {
    const SampleAcf a = sample_acf(devectorize(rng.normal_vector(2500), 50, 50));
    const double x = a.unbiased_at(0, 0), y = a.unbiased_at(2, 3);
    m00 += x;
    s00 += x * x;
    m23 += y;
    s23 += y * y;
  }
  m00 /= reps;
  m23 /= reps;
  const double se00 = std::sqrt((s00 / reps - m00 * m00) / reps);
  const double se23 = std::sqrt((s23 / reps - m23 * m23) / reps);
  CHECK(std::abs(m23) < 3 * se23);
  CHECK(std::abs(m00 - 1.0) < 3 * se00);
}

TEST_CASE("periodogram transform") {
  SampleAcf a = sample_acf(Eigen::MatrixXd::Zero(3, 3));
  CHECK(periodogram_ft(a, 4).cwiseAbs().maxCoeff() == 0.0);
  a.unbiased(2, 2) = 2.5;
  CHECK((periodogram_ft(a, 4).array() - 2.5).abs().maxCoeff() < 1e-14);

  NormalRng rng(5);
  const SampleAcf b = sample_acf(devectorize(rng.normal_vector(20), 4, 5));
  const int M = 7;
  const Eigen::MatrixXd I = periodogram_ft(b, M);
  const int spots[5][2] = {{0, 0}, {1, -3}, {7, 7}, {-5, 2}, {3, -7}};
  for (const auto& s : spots) {
    const double l1 = std::numbers::pi * s[0] / M, l2 = std::numbers::pi * s[1] / M;
    double ref = 0.0;
    for (int h = -3; h <= 3; ++h)
      for (int k = -4; k <= 4; ++k) ref += b.unbiased_at(h, k) * std::cos(h * l1 + k * l2);
    CHECK(std::abs(I(s[0] + M, s[1] + M) - ref) < 1e-12);
  }
}

TEST_CASE("biased transform is the squared DFT modulus over n") {
  NormalRng rng(6);
  const Eigen::MatrixXd g = devectorize(rng.normal_vector(20), 4, 5);
  const int M = 7;
  const Eigen::MatrixXd I = periodogram_ft(sample_acf(g), M, AcfEstimate::biased);
  for (int u = -M; u <= M; u += 3)
    for (int v = -M; v <= M; v += 2) {
      const double l1 = std::numbers::pi * u / M, l2 = std::numbers::pi * v / M;
      double re = 0, im = 0;
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 5; ++c) {
          re += g(r, c) * std::cos(r * l1 + c * l2);
          im += g(r, c) * std::sin(r * l1 + c * l2);
        }
      CHECK(I(u + M, v + M) == doctest::Approx((re * re + im * im) / 20).epsilon(1e-12));
    }
}
