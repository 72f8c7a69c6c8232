#include "cepfield/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <boost/math/special_functions/gamma.hpp>

#include "cepfield/errors.hpp"
#include "cepfield/optimize.hpp"

namespace cepfield {

Method parse_method(std::string_view name) {
  if (name == "mle") return Method::mle;
  if (name == "qmle_exact" || name == "qmle") return Method::qmle_exact;
  if (name == "qmle_approx") return Method::qmle_approx;
  if (name == "bayes") return Method::bayes;
  throw std::invalid_argument("unknown method '" + std::string(name) +
                              "' (expected mle, qmle_exact, qmle_approx or bayes)");
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::mle: return "mle";
    case Method::qmle_exact: return "qmle_exact";
    case Method::qmle_approx: return "qmle_approx";
    case Method::bayes: return "bayes";
  }
  return "?";
}

FitObjective::FitObjective(const LatticeSample& sample, CepstralGrid structure, Method method,
                           const FitOptions& opts)
    : sample_(sample), structure_(std::move(structure)), method_(method), opts_(opts) {
  if (method_ == Method::bayes) throw std::invalid_argument("bayes has no point criterion; use mcmc_fit");
  if (method_ != Method::mle) scale_ = 0.5 * static_cast<double>(sample.size());
}

CepstralGrid FitObjective::grid_at(const Eigen::VectorXd& theta) const {
  CepstralGrid g = structure_.zeros_like();
  g.set_free_values(theta);
  return g;
}

double FitObjective::criterion(const Eigen::VectorXd& theta, const Eigen::VectorXd& beta) const {
  const CepstralGrid g = grid_at(theta);
  switch (method_) {
    case Method::mle:
      return -gaussian_loglik(sample_, g, beta, opts_.acf);
    case Method::qmle_exact:
      return whittle_exact(sample_acf(sample_, beta), g, opts_.acf, opts_.acf_estimate);
    case Method::qmle_approx:
      return whittle_approx(sample_acf(sample_, beta), g, opts_.whittle_mesh, opts_.acf_estimate);
    case Method::bayes:
      break;
  }
  throw std::logic_error("unreachable");
}

double FitObjective::operator()(const Eigen::VectorXd& theta, const Eigen::VectorXd& beta) const {
  return scale_ * criterion(theta, beta);
}

Eigen::VectorXd FitObjective::update_beta(const Eigen::VectorXd& theta) const {
  const CepstralGrid g = grid_at(theta);
  if (method_ == Method::mle)
    return gls_beta(sample_, model_covariance(g, sample_.n_rows(), sample_.n_cols(), opts_.acf));
  return gls_beta(sample_, g, GlsMode::qmle, opts_.acf);
}

namespace {

// Objective over theta alone with beta (and the sample acf) held fixed.
opt::Objective theta_objective(const LatticeSample& sample, const FitObjective& objective,
                               Method method, const FitOptions& opts, const Eigen::VectorXd& beta) {
  if (method == Method::mle)
    return [&objective, beta](const Eigen::VectorXd& t) { return objective(t, beta); };
  auto acf = std::make_shared<SampleAcf>(sample_acf(sample, beta));
  const double scale = objective.scale();
  return [&objective, acf, method, opts, scale](const Eigen::VectorXd& t) {
    const CepstralGrid g = objective.grid_at(t);
    const double v = method == Method::qmle_exact
                         ? whittle_exact(*acf, g, opts.acf, opts.acf_estimate)
                         : whittle_approx(*acf, g, opts.whittle_mesh, opts.acf_estimate);
    return scale * v;
  };
}

}  // namespace

FitResult fit(const LatticeSample& sample, const CepstralGrid& structure, Method method,
              const FitOptions& opts) {
  if (method == Method::bayes) throw std::invalid_argument("use mcmc_fit for Bayesian estimation");
  const FitObjective objective(sample, structure, method, opts);

  FitResult res;
  res.method = method;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(structure.free_count()));
  Eigen::VectorXd beta = sample.ols_beta();

  opt::BfgsOptions bfgs;
  bfgs.grad_tol = opts.grad_tol;
  bfgs.fd_step = opts.fd_step;
  bfgs.max_iter = opts.max_iter;

  bool inner_ok = false;
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_theta = theta, best_beta = beta;
  for (int outer = 1; outer <= opts.max_outer; ++outer) {
    const auto step = opt::minimize_bfgs(theta_objective(sample, objective, method, opts, beta), theta, bfgs);
    inner_ok = step.converged;
    bfgs.inverse_hessian = step.inverse_hessian;
    Eigen::VectorXd new_beta = beta;
    if (sample.n_regressors() > 0) new_beta = objective.update_beta(step.x);

    double change = (step.x - theta).cwiseAbs().maxCoeff();
    if (beta.size() > 0) change = std::max(change, (new_beta - beta).cwiseAbs().maxCoeff());
    if (theta.size() == 0 && beta.size() == 0) change = 0.0;
    res.trace.push_back({outer, step.iterations, step.f, change});
    theta = step.x;
    beta = new_beta;
    if (step.f <= best) {
      best = step.f;
      best_theta = theta;
      best_beta = beta;
    }
    if (change < opts.outer_tol) {
      res.converged = inner_ok;
      break;
    }
  }
  if (!res.converged) {
    res.warnings.push_back(inner_ok ? "outer alternation did not converge"
                                    : "quasi-Newton theta step did not reach the gradient tolerance");
    theta = best_theta;
    beta = best_beta;
  }

  res.theta = theta;
  res.beta = beta;
  res.grid = objective.grid_at(theta);
  res.objective = objective.criterion(theta, beta);
  res.loglik = method == Method::mle ? -res.objective : gaussian_loglik(sample, res.grid, beta, opts.acf);

  if (opts.standard_errors) {
    try {
      const StandardErrors se = standard_errors(res, sample, opts);
      res.se_theta = se.theta;
      res.se_beta = se.beta;
      res.hessian = se.hessian;
    } catch (const Error& e) {
      res.warnings.emplace_back(e.what());
    }
  }
  return res;
}

StandardErrors standard_errors(const FitResult& fit, const LatticeSample& sample,
                               const FitOptions& opts) {
  if (fit.method == Method::bayes) throw std::invalid_argument("posterior fits carry posterior sds");
  const FitObjective objective(sample, fit.grid, fit.method, opts);
  const Eigen::Index nt = fit.theta.size();
  const Eigen::Index nb = fit.beta.size();
  Eigen::VectorXd x(nt + nb);
  x << fit.theta, fit.beta;
  const opt::Objective joint = [&](const Eigen::VectorXd& v) {
    return objective(v.head(nt), v.tail(nb));
  };
  StandardErrors se;
  se.hessian = opt::central_hessian(joint, x, opts.hessian_step);
  Eigen::LLT<Eigen::MatrixXd> llt(se.hessian);
  if (llt.info() != Eigen::Success)
    throw Error("observed Hessian is not positive definite; refine the model (mask coefficients) and refit");
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(nt + nb, nt + nb));
  const Eigen::VectorXd sd = inv.diagonal().cwiseSqrt();
  se.theta = sd.head(nt);
  se.beta = sd.tail(nb);
  return se;
}

McmcResult mcmc_fit(const LatticeSample& sample, const CepstralGrid& structure,
                    const McmcConfig& config) {
  if (config.n_iter <= 0 || config.burn_in < 0 || config.burn_in >= config.n_iter)
    throw std::invalid_argument("MCMC needs 0 <= burn_in < n_iter");
  if (!(config.proposal_scale > 0.0)) throw std::invalid_argument("proposal_scale must be > 0");
  if (!(config.prior_sd > 0.0)) throw std::invalid_argument("prior_sd must be > 0");

  const Eigen::Index nt = static_cast<Eigen::Index>(structure.free_count());
  const Eigen::Index nb = sample.n_regressors();
  const Eigen::Index d = nt + nb;
  CepstralGrid grid = structure.zeros_like();

  auto log_post = [&](const Eigen::VectorXd& x) {
    grid.set_free_values(x.head(nt));
    double lp;
    try {
      lp = gaussian_loglik(sample, grid, x.tail(nb), config.acf);
    } catch (const NotPositiveDefinite&) {
      return -std::numeric_limits<double>::infinity();
    }
    return lp - 0.5 * x.squaredNorm() / (config.prior_sd * config.prior_sd);
  };

  Eigen::MatrixXd L = Eigen::MatrixXd::Identity(d, d);
  if (config.proposal_cov) {
    if (config.proposal_cov->rows() != d || config.proposal_cov->cols() != d)
      throw std::invalid_argument("proposal covariance has the wrong dimension");
    Eigen::LLT<Eigen::MatrixXd> llt(*config.proposal_cov);
    if (llt.info() != Eigen::Success) throw std::invalid_argument("proposal covariance is not positive definite");
    L = llt.matrixL();
  }

  Eigen::VectorXd x(d);
  if (config.start) {
    if (config.start->size() != d) throw std::invalid_argument("MCMC start has the wrong dimension");
    x = *config.start;
  } else {
    x << Eigen::VectorXd::Zero(nt), sample.ols_beta();
  }
  double lp = log_post(x);
  if (!std::isfinite(lp)) throw Error("log posterior not finite at the MCMC starting point");

  NormalRng rng(config.seed);
  const int kept = config.n_iter - config.burn_in;
  McmcResult out;
  out.draws.resize(kept, d);
  long accepted = 0;
  for (int it = 0; it < config.n_iter; ++it) {
    const Eigen::VectorXd proposal = x + config.proposal_scale * (L * rng.normal_vector(d));
    const double lp_new = log_post(proposal);
    const double u = rng.uniform();
    if (std::isfinite(lp_new) && std::log(u) < lp_new - lp) {
      x = proposal;
      lp = lp_new;
      ++accepted;
    }
    if (it >= config.burn_in) out.draws.row(it - config.burn_in) = x.transpose();
  }
  out.acceptance_rate = static_cast<double>(accepted) / config.n_iter;

  const Eigen::VectorXd mean = out.draws.colwise().mean();
  const Eigen::MatrixXd centered = out.draws.rowwise() - mean.transpose();
  const Eigen::VectorXd sd =
      (centered.array().square().colwise().sum() / std::max(1, kept - 1)).sqrt().matrix().transpose();

  FitResult& f = out.fit;
  f.method = Method::bayes;
  f.theta = mean.head(nt);
  f.beta = mean.tail(nb);
  f.se_theta = sd.head(nt);
  f.se_beta = sd.tail(nb);
  f.grid = structure.zeros_like();
  f.grid.set_free_values(f.theta);
  f.loglik = gaussian_loglik(sample, f.grid, f.beta, config.acf);
  f.objective = -f.loglik;
  f.converged = true;
  if (out.acceptance_rate < 0.05 || out.acceptance_rate > 0.6)
    f.warnings.push_back("acceptance rate " + std::to_string(out.acceptance_rate) +
                         " outside [0.05, 0.6]; adjust proposal_scale");
  return out;
}

LrTest lr_test(const FitResult& full, const FitResult& nested) {
  if (full.method != Method::mle || nested.method != Method::mle)
    throw std::invalid_argument("likelihood-ratio tests need maximum-likelihood fits");
  const auto full_free = full.grid.free_positions();
  for (const Lag& l : nested.grid.free_positions()) {
    const bool present = std::find(full_free.begin(), full_free.end(), l) != full_free.end();
    if (!present)
      throw std::invalid_argument("models are not nested: coefficient (" + std::to_string(l.j) + "," +
                                  std::to_string(l.k) + ") is free only in the smaller model");
  }
  if (nested.beta.size() > full.beta.size())
    throw std::invalid_argument("models are not nested: smaller model has more regressors");
  LrTest t;
  t.dof = static_cast<int>(full.parameter_count()) - static_cast<int>(nested.parameter_count());
  t.statistic = std::max(0.0, 2.0 * (full.loglik - nested.loglik));
  if (t.dof <= 0) {
    t.p_value = 1.0;
    return t;
  }
  t.p_value = t.statistic == 0.0 ? 1.0 : boost::math::gamma_q(0.5 * t.dof, 0.5 * t.statistic);
  return t;
}

FitResult backward_delete(const LatticeSample& sample, const FitResult& fit_in,
                          const FitOptions& opts, double threshold) {
  if (fit_in.se_theta.size() != fit_in.theta.size())
    throw std::invalid_argument("backward deletion needs standard errors");
  CepstralGrid structure = fit_in.grid.zeros_like();
  const auto pos = fit_in.grid.free_positions();
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (pos[i] == Lag{0, 0}) continue;
    const auto ii = static_cast<Eigen::Index>(i);
    if (std::abs(fit_in.theta[ii]) < threshold * fit_in.se_theta[ii]) structure.fix(pos[i].j, pos[i].k);
  }
  return fit(sample, structure, fit_in.method, opts);
}

}  // namespace cepfield
