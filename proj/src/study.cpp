#include "cepfield/study.hpp"

#include <algorithm>
#include <optional>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "cepfield/covariance.hpp"
#include "cepfield/report.hpp"

namespace cepfield {

namespace {

bool is_white(const CepstralGrid& g) {
  const Eigen::VectorXd v = g.free_values();
  const std::vector<Lag> pos = g.free_positions();
  for (std::size_t i = 0; i < pos.size(); ++i)
    if (!(pos[i] == Lag{0, 0}) && v[static_cast<Eigen::Index>(i)] != 0.0) return false;
  return true;
}

}  // namespace

LatticeSimulator::LatticeSimulator(const StudyConfig& config)
    : n_rows_(config.n_rows),
      n_cols_(config.n_cols),
      design_(make_design(config.n_rows, config.n_cols, config.design)) {
  if (config.beta.size() != design_.X.cols())
    throw std::invalid_argument("beta has " + std::to_string(config.beta.size()) +
                                " entries, design has " + std::to_string(design_.X.cols()) + " columns");
  mean_ = design_.X * config.beta;
  if (is_white(config.truth))
    white_sd_ = std::exp(0.5 * config.truth(0, 0));
  else
    cov_ = model_covariance(config.truth, config.n_rows, config.n_cols, config.simulation_acf);
}

LatticeSample LatticeSimulator::draw(std::uint64_t seed) const {
  Eigen::VectorXd y;
  if (cov_) {
    y = simulate(*cov_, mean_, seed);
  } else {
    NormalRng rng(seed);
    y = mean_ + white_sd_ * rng.normal_vector(mean_.size());
  }
  return LatticeSample(devectorize(y, n_rows_, n_cols_), design_);
}

LatticeSample simulate_sample(const StudyConfig& config, std::uint64_t seed) {
  return LatticeSimulator(config).draw(seed);
}

std::vector<ParameterSummary> summarize(const Eigen::MatrixXd& estimates,
                                        const Eigen::VectorXd& truth,
                                        const std::vector<std::string>& names) {
  std::vector<ParameterSummary> out;
  const auto R = static_cast<double>(estimates.rows());
  for (Eigen::Index c = 0; c < estimates.cols(); ++c) {
    ParameterSummary s;
    s.name = c < static_cast<Eigen::Index>(names.size()) ? names[c] : "p" + std::to_string(c);
    s.truth = truth[c];
    if (R > 0) {
      const Eigen::VectorXd col = estimates.col(c);
      s.mean = col.mean();
      const double ss = (col.array() - s.mean).square().sum();
      s.variance = ss / R;
      s.sd = R > 1 ? std::sqrt(ss / (R - 1)) : 0.0;
      s.bias = s.mean - s.truth;
      s.mse = (col.array() - s.truth).square().mean();
    }
    out.push_back(s);
  }
  return out;
}

StudyResult run_study(const StudyConfig& config) {
  if (config.replicates < 2) throw std::invalid_argument("a study needs at least 2 replicates");
  const LatticeSimulator sim(config);
  const CepstralGrid structure = config.truth.zeros_like();
  const Eigen::Index n_theta = static_cast<Eigen::Index>(structure.free_count());
  const Eigen::Index n_par = n_theta + config.beta.size();

  std::vector<std::optional<Eigen::VectorXd>> results(config.replicates);
  std::vector<std::string> errors(config.replicates);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < config.replicates; r = next++) {
      try {
        const LatticeSample sample = sim.draw(config.seed + static_cast<std::uint64_t>(r));
        FitOptions opts = config.fit;
        opts.standard_errors = false;
        const FitResult f = fit(sample, structure, config.method, opts);
        Eigen::VectorXd row(n_par);
        row << f.theta, f.beta;
        results[r] = row;
        if (!f.converged) errors[r] = "not converged";
      } catch (const std::exception& e) {
        errors[r] = e.what();
      }
    }
  };
  unsigned n_threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(config.replicates));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  StudyResult out;
  for (int r = 0; r < config.replicates; ++r) {
    if (results[r]) out.succeeded.push_back(r);
    else out.failures.push_back({r, errors[r]});
  }
  out.estimates.resize(static_cast<Eigen::Index>(out.succeeded.size()), n_par);
  for (std::size_t i = 0; i < out.succeeded.size(); ++i)
    out.estimates.row(static_cast<Eigen::Index>(i)) = results[out.succeeded[i]]->transpose();

  std::vector<std::string> names = theta_names(structure);
  const std::vector<std::string> bnames = sim.design().names;
  names.insert(names.end(), bnames.begin(), bnames.end());
  Eigen::VectorXd truth(n_par);
  truth << config.truth.free_values(), config.beta;
  out.parameters = summarize(out.estimates, truth, names);
  return out;
}

std::string study_table(const StudyResult& result) {
  std::ostringstream os;
  os << std::left << std::setw(16) << "parameter" << std::right << std::setw(11) << "truth"
     << std::setw(11) << "mean" << std::setw(11) << "sd" << std::setw(12) << "mse" << "\n";
  os << std::fixed;
  for (const ParameterSummary& p : result.parameters)
    os << std::left << std::setw(16) << p.name << std::right << std::setprecision(4) << std::setw(11)
       << p.truth << std::setw(11) << p.mean << std::setw(11) << p.sd << std::setprecision(6)
       << std::setw(12) << p.mse << "\n";
  os << "replicates: " << result.succeeded.size() << " succeeded, " << result.failures.size()
     << " failed\n";
  for (const ReplicateFailure& f : result.failures)
    os << "  replicate " << f.replicate << ": " << f.message << "\n";
  return os.str();
}

}  // namespace cepfield
