#include "cepfield/lattice.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "cepfield/errors.hpp"

namespace cepfield {

DesignSpec parse_design(std::string_view name) {
  if (name == "none") return DesignSpec::none;
  if (name == "constant") return DesignSpec::constant;
  if (name == "constant+rowcol") return DesignSpec::constant_rowcol;
  throw std::invalid_argument("unknown design '" + std::string(name) +
                              "' (expected none, constant or constant+rowcol)");
}

std::string_view to_string(DesignSpec d) {
  switch (d) {
    case DesignSpec::none: return "none";
    case DesignSpec::constant: return "constant";
    case DesignSpec::constant_rowcol: return "constant+rowcol";
  }
  return "?";
}

Eigen::VectorXd vectorize(const Eigen::MatrixXd& grid) {
  Eigen::VectorXd y(grid.size());
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < grid.rows(); ++r)
    for (Eigen::Index s = 0; s < grid.cols(); ++s) y[k++] = grid(r, s);
  return y;
}

Eigen::MatrixXd devectorize(const Eigen::VectorXd& y, Eigen::Index n_rows, Eigen::Index n_cols) {
  if (y.size() != n_rows * n_cols)
    throw std::invalid_argument("vector length does not match lattice dimensions");
  Eigen::MatrixXd grid(n_rows, n_cols);
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < n_rows; ++r)
    for (Eigen::Index s = 0; s < n_cols; ++s) grid(r, s) = y[k++];
  return grid;
}

Design make_design(Eigen::Index n_rows, Eigen::Index n_cols, DesignSpec spec) {
  const Eigen::Index n = n_rows * n_cols;
  Design d;
  switch (spec) {
    case DesignSpec::none:
      d.X.resize(n, 0);
      break;
    case DesignSpec::constant:
      d.X = Eigen::MatrixXd::Ones(n, 1);
      d.names = {"intercept"};
      break;
    case DesignSpec::constant_rowcol:
      d.X.resize(n, 3);
      for (Eigen::Index r = 0; r < n_rows; ++r)
        for (Eigen::Index s = 0; s < n_cols; ++s) {
          const Eigen::Index k = r * n_cols + s;
          d.X(k, 0) = 1.0;
          d.X(k, 1) = static_cast<double>(r + 1);
          d.X(k, 2) = static_cast<double>(s + 1);
        }
      d.names = {"intercept", "row", "col"};
      break;
  }
  return d;
}

LatticeSample::LatticeSample(Eigen::MatrixXd y, Design design)
    : y_(std::move(y)), vec_(vectorize(y_)), design_(std::move(design)) {
  if (y_.size() == 0) throw std::invalid_argument("empty lattice");
  if (design_.X.rows() != y_.size())
    throw std::invalid_argument("design has " + std::to_string(design_.X.rows()) +
                                " rows for " + std::to_string(y_.size()) + " lattice cells");
  if (design_.names.size() != static_cast<std::size_t>(design_.X.cols()))
    design_.names.resize(static_cast<std::size_t>(design_.X.cols()), "x");
  if (design_.X.cols() > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design_.X);
    if (qr.rank() < design_.X.cols())
      throw std::invalid_argument("regression design is not of full column rank");
  }
}

LatticeSample::LatticeSample(Eigen::MatrixXd y, DesignSpec spec)
    : LatticeSample(y, make_design(y.rows(), y.cols(), spec)) {}

Eigen::VectorXd LatticeSample::residual(const Eigen::VectorXd& beta) const {
  if (beta.size() != design_.X.cols())
    throw std::invalid_argument("regression vector has length " + std::to_string(beta.size()) +
                                ", design has " + std::to_string(design_.X.cols()) + " columns");
  if (beta.size() == 0) return vec_;
  return vec_ - design_.X * beta;
}

Eigen::VectorXd LatticeSample::ols_beta() const {
  if (design_.X.cols() == 0) return Eigen::VectorXd(0);
  return design_.X.colPivHouseholderQr().solve(vec_);
}

LatticeSample LatticeSample::with_values(const Eigen::VectorXd& y) const {
  return LatticeSample(devectorize(y, n_rows(), n_cols()), design_);
}

SampleAcf sample_acf(const Eigen::MatrixXd& w) {
  const Eigen::Index n1 = w.rows();
  const Eigen::Index n2 = w.cols();
  SampleAcf acf;
  acf.n_rows = n1;
  acf.n_cols = n2;
  acf.biased = Eigen::MatrixXd::Zero(2 * n1 - 1, 2 * n2 - 1);
  acf.unbiased = acf.biased;
  const double n = static_cast<double>(n1 * n2);
  for (Eigen::Index h = 0; h < n1; ++h)
    for (Eigen::Index k = -(n2 - 1); k < n2; ++k) {
      const Eigen::Index s0 = std::max<Eigen::Index>(0, -k);
      const Eigen::Index s1 = std::min(n2, n2 - k);
      double acc = 0.0;
      for (Eigen::Index r = 0; r + h < n1; ++r)
        for (Eigen::Index s = s0; s < s1; ++s) acc += w(r, s) * w(r + h, s + k);
      const double biased = acc / n;
      const double unbiased =
          acc / (static_cast<double>(n1 - h) * static_cast<double>(n2 - std::abs(k)));
      acf.biased(n1 - 1 + h, n2 - 1 + k) = acf.biased(n1 - 1 - h, n2 - 1 - k) = biased;
      acf.unbiased(n1 - 1 + h, n2 - 1 + k) = acf.unbiased(n1 - 1 - h, n2 - 1 - k) = unbiased;
    }
  return acf;
}

SampleAcf sample_acf(const LatticeSample& sample, const Eigen::VectorXd& beta) {
  SampleAcf acf = sample_acf(devectorize(sample.residual(beta), sample.n_rows(), sample.n_cols()));
  acf.beta_used = beta;
  return acf;
}

Eigen::MatrixXd periodogram_ft(const SampleAcf& acf, int M, AcfEstimate which) {
  if (M < 1) throw std::invalid_argument("mesh order must be >= 1");
  const Eigen::MatrixXd& g = which == AcfEstimate::unbiased ? acf.unbiased : acf.biased;
  const int H1 = acf.max_row_lag();
  const int H2 = acf.max_col_lag();
  const int w = 2 * M + 1;
  auto trig = [&](int H, bool cosine) {
    Eigen::MatrixXd t(w, 2 * H + 1);
    for (int u = -M; u <= M; ++u)
      for (int h = -H; h <= H; ++h) {
        const double a = std::numbers::pi * u * h / M;
        t(u + M, h + H) = cosine ? std::cos(a) : std::sin(a);
      }
    return t;
  };
  // cos(a + b) = cos a cos b - sin a sin b
  const Eigen::MatrixXd c1 = trig(H1, true), s1 = trig(H1, false);
  const Eigen::MatrixXd c2 = trig(H2, true), s2 = trig(H2, false);
  return c1 * g * c2.transpose() - s1 * g * s2.transpose();
}

namespace {

bool parse_number(std::string cell, double& out) {
  const auto b = cell.find_first_not_of(" \t\r\"");
  const auto e = cell.find_last_not_of(" \t\r\"");
  if (b == std::string::npos) return false;
  cell = cell.substr(b, e - b + 1);
  if (cell == "NA" || cell == "nan" || cell == "NaN") {
    out = std::numeric_limits<double>::quiet_NaN();
    return true;
  }
  try {
    std::size_t used = 0;
    out = std::stod(cell, &used);
    return used == cell.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

Eigen::MatrixXd read_csv_grid(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    std::vector<double> row(cells.size());
    std::size_t numeric = 0;
    std::size_t bad_col = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (parse_number(cells[c], row[c]))
        ++numeric;
      else if (bad_col == 0)
        bad_col = c + 1;
    }
    if (first && numeric == 0) {
      first = false;
      continue;  // header
    }
    first = false;
    if (bad_col != 0) throw LoadError("non-numeric cell", lineno, bad_col);
    if (!rows.empty() && row.size() != rows.front().size())
      throw LoadError("ragged row: expected " + std::to_string(rows.front().size()) +
                          " cells, found " + std::to_string(row.size()),
                      lineno);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw LoadError("empty lattice file");
  Eigen::MatrixXd grid(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      grid(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return grid;
}

LatticeSample load_csv(const std::string& path, DesignSpec spec) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open lattice file " + path);
  return LatticeSample(read_csv_grid(in), spec);
}

void write_csv_grid(std::ostream& out, const Eigen::MatrixXd& grid) {
  out << std::setprecision(17);
  for (Eigen::Index r = 0; r < grid.rows(); ++r) {
    for (Eigen::Index c = 0; c < grid.cols(); ++c) out << (c ? "," : "") << grid(r, c);
    out << '\n';
  }
}

}  // namespace cepfield
