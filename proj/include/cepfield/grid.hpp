#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace cepfield {

/// A position (j, k) in a cepstral grid, -p <= j, k <= p. The first index
/// pairs with the row-axis frequency, the second with the column axis.
struct Lag {
  int j = 0;
  int k = 0;
  friend bool operator==(const Lag&, const Lag&) = default;
};

/// Zero patterns for the common cepstral submodels.
enum class Submodel {
  full,       // every coefficient free
  quadrant,   // Theta_{j,k} = 0 whenever j*k < 0
  separable,  // only the two axes are non-zero
};

Submodel parse_submodel(std::string_view name);
std::string_view to_string(Submodel s);

/**
 * Cepstral coefficients Theta_{j,k}, -p <= j,k <= p, of the log spectrum
 *
 *     log F(l1, l2) = sum_{j,k} Theta_{j,k} exp(-i (j l1 + k l2)).
 *
 * Mirror symmetry Theta_{j,k} = Theta_{-j,-k} is maintained by every
 * mutator. A mask marks coefficients structurally fixed at zero; the mask
 * is mirror symmetric as well.
 *
 * The non-redundant ("free") coefficients are ordered canonically:
 * Theta_{0,0} first, then the half-plane {(j,0): j >= 1} followed by
 * {(j,k): k >= 1} with k ascending and j ascending within each k. Masked
 * positions are skipped.
 */
class CepstralGrid {
 public:
  CepstralGrid() : CepstralGrid(0) {}
  explicit CepstralGrid(int order);

  int order() const { return p_; }
  int width() const { return 2 * p_ + 1; }

  double operator()(int j, int k) const { return theta_[index(j, k)]; }
  double at(Lag l) const { return (*this)(l.j, l.k); }

  /// Sets Theta_{j,k} and its mirror. Throws if the position is masked and
  /// the value is non-zero.
  void set(int j, int k, double value);

  bool is_fixed(int j, int k) const { return mask_[index(j, k)] != 0; }
  /// Fixes Theta_{j,k} (and its mirror) at zero.
  void fix(int j, int k);
  void release(int j, int k);
  void apply(Submodel s);

  std::size_t free_count() const;
  std::vector<Lag> free_positions() const;
  Eigen::VectorXd free_values() const;
  void set_free_values(std::span<const double> values);
  void set_free_values(const Eigen::VectorXd& values) {
    set_free_values(std::span<const double>(values.data(), values.size()));
  }

  /// Same order and mask with every coefficient zero.
  CepstralGrid zeros_like() const;
  /// Entrywise -Theta; the spectrum of the result is 1 / F.
  CepstralGrid negated() const;

  /// The (2p+1)x(2p+1) display matrix [Theta] with
  /// [Theta]_{r,c} = Theta_{c-p-1, p+1-r} (1-based r, c).
  Eigen::MatrixXd as_matrix() const;
  static CepstralGrid from_matrix(const Eigen::MatrixXd& m);

  double max_abs() const;

  friend bool operator==(const CepstralGrid&, const CepstralGrid&) = default;

 private:
  std::size_t index(int j, int k) const;

  int p_ = 0;
  std::vector<double> theta_;
  std::vector<char> mask_;
};

/// True when (j, k) is the canonical representative of its mirror pair.
bool is_canonical(Lag l);

/// All canonical positions of an order-p grid in canonical order.
std::vector<Lag> canonical_positions(int order);

/// Positions theta_1, theta_2, ... of the column-stacked display matrix
/// vec[Theta], truncated to the non-redundant leading block (the last entry
/// is Theta_{0,0}). Used to label estimates in tables.
std::vector<Lag> vec_positions(int order);

/// Builds a grid from values listed in vec[Theta] order.
CepstralGrid grid_from_vec(int order, std::span<const double> values);

/// Plain-text grid file: a header line "p=<int>" followed by 2p+1 rows of
/// the display matrix [Theta]. An optional "mask" line and 2p+1 rows of 0/1
/// flags follow.
void write_grid(std::ostream& os, const CepstralGrid& grid);
CepstralGrid read_grid(std::istream& is);
CepstralGrid load_grid(const std::string& path);
void save_grid(const std::string& path, const CepstralGrid& grid);

}  // namespace cepfield
