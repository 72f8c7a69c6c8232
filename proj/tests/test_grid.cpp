#include <doctest.h>

#include <sstream>

#include "cepfield/errors.hpp"
#include "cepfield/grid.hpp"
#include "oracles.hpp"

using namespace cepfield;

TEST_CASE("free parameter count is 2p^2 + 2p + 1") {
  for (int p = 0; p <= 5; ++p) CHECK(CepstralGrid(p).free_count() == std::size_t(2 * p * p + 2 * p + 1));
  CHECK(CepstralGrid(2).free_count() == 13);
}

TEST_CASE("set keeps mirror symmetry") {
  CepstralGrid g(2);
  g.set(1, -2, 0.3);
  CHECK(g(1, -2) == 0.3);
  CHECK(g(-1, 2) == 0.3);
}

TEST_CASE("canonical ordering starts at the origin") {
  const auto pos = canonical_positions(1);
  REQUIRE(pos.size() == 5);
  CHECK(pos[0] == Lag{0, 0});
  CHECK(pos[1] == Lag{1, 0});
  CHECK(pos[2] == Lag{-1, 1});
  CHECK(pos[3] == Lag{0, 1});
  CHECK(pos[4] == Lag{1, 1});
}

TEST_CASE("free vector round trip") {
  std::mt19937_64 rng(3);
  const CepstralGrid g = oracle::random_grid(3, 0.5, rng);
  CepstralGrid h = g.zeros_like();
  h.set_free_values(g.free_values());
  CHECK(h == g);
  CHECK(h.free_values() == g.free_values());
}

TEST_CASE("display matrix indexing") {
  CepstralGrid g(1);
  g.set(1, 1, 0.5);
  g.set(-1, 1, 0.25);
  g.set(0, 0, -1.0);
  const Eigen::MatrixXd m = g.as_matrix();
  // [Theta]_{r,c} = Theta_{c-p-1, p+1-r}, 1-based
  CHECK(m(0, 2) == 0.5);   // r=1,c=3 -> (1,1)
  CHECK(m(0, 0) == 0.25);  // r=1,c=1 -> (-1,1)
  CHECK(m(1, 1) == -1.0);
  CHECK(CepstralGrid::from_matrix(m) == g);
}

TEST_CASE("from_matrix rejects asymmetric input") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
  m(0, 0) = 1.0;
  CHECK_THROWS_AS(CepstralGrid::from_matrix(m), std::invalid_argument);
}

TEST_CASE("vec positions end at the origin") {
  const auto v = vec_positions(2);
  REQUIRE(v.size() == 13);
  CHECK(v.front() == Lag{-2, 2});
  CHECK(v[4] == Lag{-2, -2});
  CHECK(v[5] == Lag{-1, 2});
  CHECK(v.back() == Lag{0, 0});
  std::vector<double> vals(13);
  for (int i = 0; i < 13; ++i) vals[i] = i + 1;
  const CepstralGrid g = grid_from_vec(2, vals);
  CHECK(g(0, 0) == 13);
  CHECK(g(2, -2) == 1);
  CHECK(g(0, 1) == 12);
}

TEST_CASE("masks") {
  CepstralGrid g(2);
  g.apply(Submodel::quadrant);
  CHECK(g.is_fixed(-1, 1));
  CHECK(g.is_fixed(1, -1));
  CHECK_FALSE(g.is_fixed(1, 1));
  CHECK_THROWS(g.set(-1, 1, 0.1));
  CHECK(g.free_count() == 9);
  CepstralGrid s(2);
  s.apply(Submodel::separable);
  CHECK(s.free_count() == 5);
  s.release(1, 1);
  CHECK(s.free_count() == 6);
  s.fix(1, 0);
  CHECK(s.free_count() == 5);
}

TEST_CASE("text round trip keeps values and mask") {
  std::mt19937_64 rng(9);
  CepstralGrid g = oracle::random_grid(2, 0.5, rng);
  g.fix(2, -1);
  std::stringstream ss;
  write_grid(ss, g);
  CHECK(ss.str().rfind("p=2\n", 0) == 0);
  const CepstralGrid back = read_grid(ss);
  CHECK(back.is_fixed(-2, 1));
  CHECK((back.as_matrix() - g.as_matrix()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("malformed grid file") {
  std::stringstream ss("p=1\n0 0 0\n0 1 0\n");
  CHECK_THROWS_AS(read_grid(ss), LoadError);
}
