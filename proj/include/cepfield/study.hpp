#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cepfield/covariance.hpp"
#include "cepfield/estimation.hpp"

namespace cepfield {

struct StudyConfig {
  CepstralGrid truth;       // generating coefficients; its mask is the fitted structure
  Eigen::VectorXd beta;     // generating regression coefficients
  DesignSpec design = DesignSpec::constant_rowcol;
  Eigen::Index n_rows = 20;
  Eigen::Index n_cols = 25;
  int replicates = 200;
  std::uint64_t seed = 1;   // replicate r uses seed + r
  Method method = Method::mle;
  FitOptions fit;
  AcfOptions simulation_acf;
  unsigned threads = 0;     // 0 = hardware concurrency
};

struct ParameterSummary {
  std::string name;
  double truth = 0.0;
  double mean = 0.0;
  double sd = 0.0;        // divisor R - 1
  double variance = 0.0;  // divisor R
  double bias = 0.0;
  double mse = 0.0;       // mean squared error; equals bias^2 + variance
};

struct ReplicateFailure {
  int replicate = 0;
  std::string message;
};

struct StudyResult {
  std::vector<ParameterSummary> parameters;  // free theta (canonical order), then beta
  Eigen::MatrixXd estimates;                 // one row per successful replicate
  std::vector<int> succeeded;
  std::vector<ReplicateFailure> failures;
};

/// Draws lattices from the generating model of a study. The covariance is
/// factored once; a white-noise truth skips it and scales i.i.d. normals.
class LatticeSimulator {
 public:
  explicit LatticeSimulator(const StudyConfig& config);
  LatticeSample draw(std::uint64_t seed) const;
  const Design& design() const { return design_; }

 private:
  Eigen::Index n_rows_;
  Eigen::Index n_cols_;
  Design design_;
  Eigen::VectorXd mean_;
  std::optional<BlockToeplitzCov> cov_;
  double white_sd_ = 1.0;
};

/// Simulated lattice for replicate seed `seed`.
LatticeSample simulate_sample(const StudyConfig& config, std::uint64_t seed);

StudyResult run_study(const StudyConfig& config);

/// Summaries from an estimates matrix (rows = replicates).
std::vector<ParameterSummary> summarize(const Eigen::MatrixXd& estimates,
                                        const Eigen::VectorXd& truth,
                                        const std::vector<std::string>& names);

std::string study_table(const StudyResult& result);

}  // namespace cepfield
