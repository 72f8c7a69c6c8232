#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cepfield/grid.hpp"
#include "cepfield/lattice.hpp"
#include "cepfield/objectives.hpp"

namespace cepfield {

/// Observed cells of a lattice. The selection matrix J is represented by the
/// strictly increasing list of lexicographic positions (0-based) it keeps.
class SelectionMap {
 public:
  SelectionMap() = default;
  explicit SelectionMap(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& observed);

  static SelectionMap all(Eigen::Index n_rows, Eigen::Index n_cols);
  /// Cells holding NaN are treated as missing.
  static SelectionMap from_nan(const Eigen::MatrixXd& grid);

  Eigen::Index n_rows() const { return observed_.rows(); }
  Eigen::Index n_cols() const { return observed_.cols(); }
  const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& observed() const { return observed_; }
  const std::vector<Eigen::Index>& indices() const { return index_; }
  Eigen::Index count() const { return static_cast<Eigen::Index>(index_.size()); }
  bool complete() const { return count() == observed_.size(); }

  /// J v
  Eigen::VectorXd select(const Eigen::VectorXd& v) const;
  /// J A J'
  Eigen::MatrixXd contract(const Eigen::MatrixXd& a) const;
  /// J A
  Eigen::MatrixXd select_rows(const Eigen::MatrixXd& a) const;

 private:
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> observed_;
  std::vector<Eigen::Index> index_;
};

/// Gaussian log-likelihood of Z = J Y with covariance J Sigma J', without
/// the constant. Missing cells of the sample's grid may hold any value.
double missing_loglik(const LatticeSample& sample, const SelectionMap& selection,
                      const CepstralGrid& grid, const Eigen::VectorXd& beta,
                      const AcfOptions& opts = {});

struct SignalNoiseSpec {
  CepstralGrid signal;
  CepstralGrid noise;
  Eigen::VectorXd beta;
  /// One flag per design column; true columns form the signal mean.
  std::vector<bool> mean_assignment;
};

struct SignalExtraction {
  Eigen::MatrixXd mean;      // conditional mean of the signal, lattice shaped
  Eigen::MatrixXd std_error; // pointwise conditional standard deviation
  /// Full conditional covariance, only for lattices of at most
  /// kDenseCovarianceLimit sites.
  std::optional<Eigen::MatrixXd> covariance;
};

inline constexpr Eigen::Index kDenseCovarianceLimit = 32 * 32;

SignalExtraction extract_signal(const LatticeSample& sample, const SignalNoiseSpec& spec,
                                const SelectionMap& selection, const AcfOptions& opts = {});

/// Dense covariance of the full lattice under `grid`.
Eigen::MatrixXd lattice_covariance(const CepstralGrid& grid, Eigen::Index n_rows,
                                   Eigen::Index n_cols, const AcfOptions& opts = {});

}  // namespace cepfield
