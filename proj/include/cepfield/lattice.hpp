#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace cepfield {

/// Regression designs built from lattice coordinates.
enum class DesignSpec {
  none,             // no mean
  constant,         // intercept
  constant_rowcol,  // intercept, row index r, column index s (1-based)
};

DesignSpec parse_design(std::string_view name);
std::string_view to_string(DesignSpec d);

/// Position of lattice cell (r, s) (1-based) in the lexicographic vector:
/// k = n_cols (r - 1) + s.
inline std::size_t lex_index(std::size_t r, std::size_t s, std::size_t n_cols) {
  return n_cols * (r - 1) + s;
}

/// Row-major stacking of a lattice grid.
Eigen::VectorXd vectorize(const Eigen::MatrixXd& grid);
Eigen::MatrixXd devectorize(const Eigen::VectorXd& y, Eigen::Index n_rows, Eigen::Index n_cols);

struct Design {
  Eigen::MatrixXd X;
  std::vector<std::string> names;
};

Design make_design(Eigen::Index n_rows, Eigen::Index n_cols, DesignSpec spec);

/// An n_rows x n_cols observation grid with its vectorized regression design.
class LatticeSample {
 public:
  LatticeSample() = default;
  LatticeSample(Eigen::MatrixXd y, Design design);
  LatticeSample(Eigen::MatrixXd y, DesignSpec spec);

  Eigen::Index n_rows() const { return y_.rows(); }
  Eigen::Index n_cols() const { return y_.cols(); }
  Eigen::Index size() const { return y_.size(); }

  const Eigen::MatrixXd& grid() const { return y_; }
  const Eigen::VectorXd& y() const { return vec_; }
  const Eigen::MatrixXd& design() const { return design_.X; }
  const std::vector<std::string>& names() const { return design_.names; }
  Eigen::Index n_regressors() const { return design_.X.cols(); }

  /// Y - X beta.
  Eigen::VectorXd residual(const Eigen::VectorXd& beta) const;
  /// Ordinary least squares; zero-length when there are no regressors.
  Eigen::VectorXd ols_beta() const;

  /// Same design, new observations.
  LatticeSample with_values(const Eigen::VectorXd& y) const;

 private:
  Eigen::MatrixXd y_;
  Eigen::VectorXd vec_;
  Design design_;
};

/// Biased and divisor-corrected sample autocovariances of Y - X beta over
/// all lags |h| < n_rows, |k| < n_cols. Tables are indexed (h + n_rows - 1,
/// k + n_cols - 1).
struct SampleAcf {
  Eigen::Index n_rows = 0;
  Eigen::Index n_cols = 0;
  Eigen::MatrixXd biased;
  Eigen::MatrixXd unbiased;
  Eigen::VectorXd beta_used;

  int max_row_lag() const { return static_cast<int>(n_rows) - 1; }
  int max_col_lag() const { return static_cast<int>(n_cols) - 1; }
  double biased_at(int h, int k) const { return biased(h + n_rows - 1, k + n_cols - 1); }
  double unbiased_at(int h, int k) const { return unbiased(h + n_rows - 1, k + n_cols - 1); }
};

SampleAcf sample_acf(const LatticeSample& sample, const Eigen::VectorXd& beta);
/// Sample autocovariances of an already de-meaned grid.
SampleAcf sample_acf(const Eigen::MatrixXd& residual_grid);

enum class AcfEstimate { unbiased, biased };

/// Fourier transform of the sample autocovariances on the mesh
/// (pi u / M, pi v / M), -M <= u, v <= M, indexed (u + M, v + M). With the
/// unbiased estimate the result can be negative.
Eigen::MatrixXd periodogram_ft(const SampleAcf& acf, int M,
                               AcfEstimate which = AcfEstimate::unbiased);

/// Loads a rectangular numeric CSV (rows = lattice rows). A non-numeric
/// first row is treated as a header. NA and nan cells load as NaN.
LatticeSample load_csv(const std::string& path, DesignSpec spec);
Eigen::MatrixXd read_csv_grid(std::istream& in);
void write_csv_grid(std::ostream& out, const Eigen::MatrixXd& grid);

}  // namespace cepfield
