#include <doctest.h>

#include <cmath>

#include "cepfield/errors.hpp"
#include "cepfield/estimation.hpp"
#include "cepfield/optimize.hpp"
#include "cepfield/study.hpp"

using namespace cepfield;

namespace {

LatticeSample simulated(const CepstralGrid& g, Eigen::VectorXd beta, int R, int C, DesignSpec d,
                        std::uint64_t seed) {
  StudyConfig cfg;
  cfg.truth = g;
  cfg.beta = std::move(beta);
  cfg.design = d;
  cfg.n_rows = R;
  cfg.n_cols = C;
  return simulate_sample(cfg, seed);
}

}  // namespace

TEST_CASE("method names") {
  CHECK(parse_method("mle") == Method::mle);
  CHECK(parse_method("qmle") == Method::qmle_exact);
  CHECK(parse_method("qmle_approx") == Method::qmle_approx);
  CHECK(to_string(Method::bayes) == "bayes");
  CHECK_THROWS(parse_method("ols"));
}

TEST_CASE("quasi-Newton on a quadratic and on Rosenbrock") {
  const Eigen::Vector3d a(1.0, -2.0, 0.5);
  const opt::Objective q = [&](const Eigen::VectorXd& x) { return 0.5 * (x - a).squaredNorm(); };
  const auto r = opt::minimize_bfgs(q, Eigen::VectorXd::Zero(3));
  CHECK(r.converged);
  CHECK((r.x - a).cwiseAbs().maxCoeff() < 1e-6);
  const Eigen::MatrixXd H = opt::central_hessian(q, r.x);
  CHECK((H - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-6);
  // standard errors of a unit-Hessian objective
  CHECK((H.inverse().diagonal().cwiseSqrt().array() - 1.0).abs().maxCoeff() < 1e-6);

  const opt::Objective rosen = [](const Eigen::VectorXd& x) {
    return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
  };
  opt::BfgsOptions o;
  o.max_iter = 2000;
  const auto rr = opt::minimize_bfgs(rosen, Eigen::Vector2d(-1.2, 1.0), o);
  CHECK(rr.x[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(rr.x[1] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("inadmissible points are treated as +inf") {
  const opt::Objective f = [](const Eigen::VectorXd& x) {
    if (x[0] > 0.5) throw NotPositiveDefinite(1);
    return (x[0] - 0.4) * (x[0] - 0.4);
  };
  const auto r = opt::minimize_bfgs(f, Eigen::VectorXd::Zero(1));
  CHECK(r.x[0] == doctest::Approx(0.4).epsilon(1e-5));
}

TEST_CASE("white-noise fit recovers the mean and a flat spectrum") {
  Eigen::VectorXd beta(1);
  beta << 5.0;
  const LatticeSample s = simulated(CepstralGrid(1), beta, 20, 20, DesignSpec::constant, 11);
  const FitResult f = fit(s, CepstralGrid(1), Method::mle);
  CHECK(f.converged);
  REQUIRE(f.se_beta.size() == 1);
  CHECK(std::abs(f.beta[0] - 5.0) < 3 * f.se_beta[0]);
  CHECK(f.theta.cwiseAbs().maxCoeff() < 3.0 / 20);
  CHECK(f.parameter_count() == 6);
}

TEST_CASE("order-0 fit gives the log residual variance") {
  NormalRng rng(12);
  const LatticeSample s(devectorize(rng.normal_vector(64) * 2.0, 8, 8), DesignSpec::constant_rowcol);
  const FitResult f = fit(s, CepstralGrid(0), Method::mle);
  const Eigen::VectorXd r = s.residual(s.ols_beta());
  CHECK(f.theta[0] == doctest::Approx(std::log(r.squaredNorm() / 64)).epsilon(1e-5));
  CHECK((f.beta - s.ols_beta()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("scale-only QMLE matches the closed form") {
  NormalRng rng(13);
  const LatticeSample s(devectorize(rng.normal_vector(100), 10, 10), DesignSpec::constant);
  FitOptions o;
  o.grad_tol = 1e-9;
  const FitResult f = fit(s, CepstralGrid(0), Method::qmle_exact, o);
  const SampleAcf a = sample_acf(s, f.beta);
  CHECK(f.theta[0] == doctest::Approx(std::log(a.unbiased_at(0, 0))).epsilon(1e-6));
}

TEST_CASE("MLE alternation is monotone") {
  CepstralGrid g(1);
  g.set(0, 1, 0.3);
  g.set(1, 1, -0.2);
  const LatticeSample s = simulated(g, Eigen::Vector3d(1.0, 0.1, -0.1), 10, 12, DesignSpec::constant_rowcol, 14);
  FitOptions o;
  o.standard_errors = false;
  const FitResult f = fit(s, CepstralGrid(1), Method::mle, o);
  REQUIRE(f.trace.size() >= 2);
  for (std::size_t i = 1; i < f.trace.size(); ++i) CHECK(f.trace[i].objective <= f.trace[i - 1].objective + 1e-9);
  CHECK(f.loglik == doctest::Approx(-f.objective));
}

TEST_CASE("QMLE and MLE agree within sampling error") {
  CepstralGrid g(1);
  g.set(1, 0, 0.3);
  g.set(0, 1, 0.2);
  const LatticeSample s = simulated(g, Eigen::VectorXd::Constant(1, 2.0), 14, 14, DesignSpec::constant, 15);
  const FitResult m = fit(s, CepstralGrid(1), Method::mle);
  for (Method q : {Method::qmle_exact, Method::qmle_approx}) {
    const FitResult w = fit(s, CepstralGrid(1), q);
    CHECK(w.method == q);
    for (Eigen::Index i = 0; i < m.theta.size(); ++i) CHECK(std::abs(w.theta[i] - m.theta[i]) < 2 * m.se_theta[i]);
  }
}

TEST_CASE("non-convergence is flagged and the best iterate kept") {
  CepstralGrid g(1);
  g.set(0, 1, 0.4);
  const LatticeSample s = simulated(g, Eigen::VectorXd::Constant(1, 0.0), 8, 8, DesignSpec::constant, 16);
  FitOptions o;
  o.max_outer = 1;
  o.max_iter = 1;
  o.standard_errors = false;
  const FitResult f = fit(s, CepstralGrid(1), Method::mle, o);
  CHECK_FALSE(f.converged);
  CHECK_FALSE(f.warnings.empty());
  CHECK(std::isfinite(f.objective));
}

TEST_CASE("masked coefficients stay at zero") {
  CepstralGrid structure(1);
  structure.apply(Submodel::separable);
  CepstralGrid g = structure;
  g.set(1, 0, 0.3);
  const LatticeSample s = simulated(g, Eigen::VectorXd::Constant(1, 0.0), 10, 10, DesignSpec::constant, 17);
  const FitResult f = fit(s, structure, Method::mle);
  CHECK(f.theta.size() == 3);
  CHECK(f.grid(1, 1) == 0.0);
  CHECK(f.grid(-1, 1) == 0.0);
}

TEST_CASE("likelihood-ratio test") {
  CepstralGrid g(1);
  g.set(1, 1, 0.4);
  const LatticeSample s = simulated(g, Eigen::VectorXd::Constant(1, 0.0), 12, 12, DesignSpec::constant, 18);
  FitOptions o;
  o.standard_errors = false;
  const FitResult full = fit(s, CepstralGrid(1), Method::mle, o);
  const LrTest same = lr_test(full, full);
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == 1.0);
  CepstralGrid nested(1);
  nested.fix(1, 1);
  const FitResult small = fit(s, nested, Method::mle, o);
  const LrTest t = lr_test(full, small);
  CHECK(t.dof == 1);
  CHECK(t.statistic > 0.0);
  CHECK(t.p_value < 0.05);
  CHECK_THROWS(lr_test(small, full));
}

TEST_CASE("backward deletion drops small coefficients") {
  CepstralGrid g(1);
  g.set(0, 1, 0.5);
  const LatticeSample s = simulated(g, Eigen::VectorXd::Constant(1, 0.0), 14, 14, DesignSpec::constant, 19);
  const FitResult f = fit(s, CepstralGrid(1), Method::mle);
  const FitResult r = backward_delete(s, f);
  CHECK(r.theta.size() < f.theta.size());
  CHECK_FALSE(r.grid.is_fixed(0, 1));
  CHECK_FALSE(r.grid.is_fixed(0, 0));
}

TEST_CASE("seeded MCMC replays and warns on poor acceptance") {
  CepstralGrid g(1);
  g.set(0, 1, 0.3);
  const LatticeSample s = simulated(g, Eigen::VectorXd::Constant(1, 1.0), 6, 6, DesignSpec::constant, 20);
  McmcConfig c;
  c.n_iter = 300;
  c.burn_in = 100;
  c.seed = 5;
  const McmcResult a = mcmc_fit(s, CepstralGrid(1), c);
  const McmcResult b = mcmc_fit(s, CepstralGrid(1), c);
  CHECK(a.draws == b.draws);
  CHECK(a.draws.rows() == 200);
  CHECK(a.draws.cols() == 6);
  CHECK(a.fit.method == Method::bayes);
  c.proposal_scale = 5.0;
  const McmcResult bad = mcmc_fit(s, CepstralGrid(1), c);
  CHECK(bad.acceptance_rate < 0.05);
  CHECK_FALSE(bad.fit.warnings.empty());
}
