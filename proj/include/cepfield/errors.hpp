#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cepfield {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cholesky factorization failed; `minor` is the 1-based order of the first
/// leading minor that is not positive.
class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(std::size_t minor)
      : Error("covariance matrix is not positive definite (leading minor " +
              std::to_string(minor) + ")"),
        minor_(minor) {}
  std::size_t minor() const { return minor_; }

 private:
  std::size_t minor_;
};

/// Malformed lattice or grid input. Row and column are 1-based; zero means
/// "not applicable".
class LoadError : public Error {
 public:
  LoadError(const std::string& what, std::size_t row = 0, std::size_t col = 0)
      : Error(format(what, row, col)), row_(row), col_(col) {}
  std::size_t row() const { return row_; }
  std::size_t col() const { return col_; }

 private:
  static std::string format(const std::string& what, std::size_t row,
                            std::size_t col) {
    if (row == 0) return what;
    std::string s = what + " (row " + std::to_string(row);
    if (col != 0) s += ", column " + std::to_string(col);
    return s + ")";
  }
  std::size_t row_;
  std::size_t col_;
};

}  // namespace cepfield
