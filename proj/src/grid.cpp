#include "cepfield/grid.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cepfield/errors.hpp"

namespace cepfield {

Submodel parse_submodel(std::string_view name) {
  if (name == "full") return Submodel::full;
  if (name == "quadrant") return Submodel::quadrant;
  if (name == "separable") return Submodel::separable;
  throw std::invalid_argument("unknown submodel '" + std::string(name) + "'");
}

std::string_view to_string(Submodel s) {
  switch (s) {
    case Submodel::full: return "full";
    case Submodel::quadrant: return "quadrant";
    case Submodel::separable: return "separable";
  }
  return "?";
}

CepstralGrid::CepstralGrid(int order) : p_(order) {
  if (order < 0) throw std::invalid_argument("cepstral order must be >= 0");
  const auto n = static_cast<std::size_t>(width() * width());
  theta_.assign(n, 0.0);
  mask_.assign(n, 0);
}

std::size_t CepstralGrid::index(int j, int k) const {
  if (j < -p_ || j > p_ || k < -p_ || k > p_)
    throw std::out_of_range("cepstral index (" + std::to_string(j) + "," +
                            std::to_string(k) + ") outside order " +
                            std::to_string(p_));
  return static_cast<std::size_t>((j + p_) * width() + (k + p_));
}

void CepstralGrid::set(int j, int k, double value) {
  if (is_fixed(j, k) && value != 0.0)
    throw std::invalid_argument("cepstral coefficient (" + std::to_string(j) +
                                "," + std::to_string(k) + ") is fixed at zero");
  theta_[index(j, k)] = value;
  theta_[index(-j, -k)] = value;
}

void CepstralGrid::fix(int j, int k) {
  mask_[index(j, k)] = 1;
  mask_[index(-j, -k)] = 1;
  theta_[index(j, k)] = 0.0;
  theta_[index(-j, -k)] = 0.0;
}

void CepstralGrid::release(int j, int k) {
  mask_[index(j, k)] = 0;
  mask_[index(-j, -k)] = 0;
}

void CepstralGrid::apply(Submodel s) {
  for (int j = -p_; j <= p_; ++j)
    for (int k = -p_; k <= p_; ++k) {
      const bool zero = (s == Submodel::quadrant && j * k < 0) ||
                        (s == Submodel::separable && j != 0 && k != 0);
      if (zero) fix(j, k);
    }
}

bool is_canonical(Lag l) {
  return l.k > 0 || (l.k == 0 && l.j >= 0);
}

std::vector<Lag> canonical_positions(int order) {
  std::vector<Lag> out;
  out.push_back({0, 0});
  for (int j = 1; j <= order; ++j) out.push_back({j, 0});
  for (int k = 1; k <= order; ++k)
    for (int j = -order; j <= order; ++j) out.push_back({j, k});
  return out;
}

std::size_t CepstralGrid::free_count() const {
  std::size_t n = 0;
  for (const Lag& l : canonical_positions(p_))
    if (!is_fixed(l.j, l.k)) ++n;
  return n;
}

std::vector<Lag> CepstralGrid::free_positions() const {
  std::vector<Lag> out;
  for (const Lag& l : canonical_positions(p_))
    if (!is_fixed(l.j, l.k)) out.push_back(l);
  return out;
}

Eigen::VectorXd CepstralGrid::free_values() const {
  const auto pos = free_positions();
  Eigen::VectorXd v(static_cast<Eigen::Index>(pos.size()));
  for (std::size_t i = 0; i < pos.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = at(pos[i]);
  return v;
}

void CepstralGrid::set_free_values(std::span<const double> values) {
  const auto pos = free_positions();
  if (values.size() != pos.size())
    throw std::invalid_argument("expected " + std::to_string(pos.size()) +
                                " free cepstral values, got " +
                                std::to_string(values.size()));
  for (std::size_t i = 0; i < pos.size(); ++i)
    set(pos[i].j, pos[i].k, values[i]);
}

CepstralGrid CepstralGrid::zeros_like() const {
  CepstralGrid g = *this;
  std::fill(g.theta_.begin(), g.theta_.end(), 0.0);
  return g;
}

CepstralGrid CepstralGrid::negated() const {
  CepstralGrid g = *this;
  for (double& t : g.theta_) t = -t;
  return g;
}

Eigen::MatrixXd CepstralGrid::as_matrix() const {
  const int w = width();
  Eigen::MatrixXd m(w, w);
  for (int r = 1; r <= w; ++r)
    for (int c = 1; c <= w; ++c) m(r - 1, c - 1) = (*this)(c - p_ - 1, p_ + 1 - r);
  return m;
}

CepstralGrid CepstralGrid::from_matrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() % 2 == 0)
    throw std::invalid_argument("cepstral matrix must be square of odd size");
  const int p = static_cast<int>(m.rows() / 2);
  CepstralGrid g(p);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (int r = 1; r <= g.width(); ++r)
    for (int c = 1; c <= g.width(); ++c) {
      const int j = c - p - 1;
      const int k = p + 1 - r;
      const double v = m(r - 1, c - 1);
      const double mirror = m(p + 1 + k - 1, -j + p + 1 - 1);
      if (std::abs(v - mirror) > 1e-12 * scale)
        throw std::invalid_argument("cepstral matrix violates mirror symmetry at (" +
                                    std::to_string(j) + "," + std::to_string(k) + ")");
      g.theta_[g.index(j, k)] = v;
    }
  return g;
}

double CepstralGrid::max_abs() const {
  double m = 0.0;
  for (double t : theta_) m = std::max(m, std::abs(t));
  return m;
}

std::vector<Lag> vec_positions(int order) {
  const int w = 2 * order + 1;
  const int n = (w * w + 1) / 2;
  std::vector<Lag> out;
  for (int c = 1; c <= w && static_cast<int>(out.size()) < n; ++c)
    for (int r = 1; r <= w && static_cast<int>(out.size()) < n; ++r)
      out.push_back({c - order - 1, order + 1 - r});
  return out;
}

CepstralGrid grid_from_vec(int order, std::span<const double> values) {
  const auto pos = vec_positions(order);
  if (values.size() != pos.size())
    throw std::invalid_argument("expected " + std::to_string(pos.size()) +
                                " vec[Theta] values");
  CepstralGrid g(order);
  for (std::size_t i = 0; i < pos.size(); ++i) g.set(pos[i].j, pos[i].k, values[i]);
  return g;
}

void write_grid(std::ostream& os, const CepstralGrid& grid) {
  const int w = grid.width();
  const int p = grid.order();
  os << "p=" << p << '\n';
  const Eigen::MatrixXd m = grid.as_matrix();
  os << std::setprecision(17);
  for (int r = 0; r < w; ++r) {
    for (int c = 0; c < w; ++c) os << (c ? " " : "") << m(r, c);
    os << '\n';
  }
  bool any_mask = false;
  for (int j = -p; j <= p; ++j)
    for (int k = -p; k <= p; ++k) any_mask |= grid.is_fixed(j, k);
  if (!any_mask) return;
  os << "mask\n";
  for (int r = 1; r <= w; ++r) {
    for (int c = 1; c <= w; ++c)
      os << (c > 1 ? " " : "") << (grid.is_fixed(c - p - 1, p + 1 - r) ? 1 : 0);
    os << '\n';
  }
}

namespace {

std::vector<double> parse_row(const std::string& line, std::size_t lineno) {
  std::vector<double> row;
  std::string cell;
  std::istringstream ss(line);
  std::size_t col = 0;
  while (ss >> cell) {
    ++col;
    if (!cell.empty() && cell.back() == ',') cell.pop_back();
    try {
      std::size_t used = 0;
      row.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw LoadError("non-numeric grid entry '" + cell + "'", lineno, col);
    }
  }
  return row;
}

}  // namespace

CepstralGrid read_grid(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line) && line.find_first_not_of(" \t\r") == std::string::npos)
    ++lineno;
  ++lineno;
  if (line.rfind("p=", 0) != 0) throw LoadError("grid file must start with 'p=<order>'", lineno);
  int p = 0;
  try {
    p = std::stoi(line.substr(2));
  } catch (const std::exception&) {
    throw LoadError("bad order in grid header", lineno);
  }
  if (p < 0) throw LoadError("negative order in grid header", lineno);
  const int w = 2 * p + 1;
  Eigen::MatrixXd m(w, w);
  for (int r = 0; r < w; ++r) {
    if (!std::getline(is, line)) throw LoadError("grid file truncated", lineno + 1);
    ++lineno;
    const auto row = parse_row(line, lineno);
    if (static_cast<int>(row.size()) != w)
      throw LoadError("expected " + std::to_string(w) + " grid entries", lineno);
    for (int c = 0; c < w; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
  }
  CepstralGrid g;
  try {
    g = CepstralGrid::from_matrix(m);
  } catch (const std::invalid_argument& e) {
    throw LoadError(e.what());
  }
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line.rfind("mask", 0) != 0) throw LoadError("unexpected content after grid", lineno);
    for (int r = 1; r <= w; ++r) {
      if (!std::getline(is, line)) throw LoadError("mask truncated", lineno + 1);
      ++lineno;
      const auto row = parse_row(line, lineno);
      if (static_cast<int>(row.size()) != w)
        throw LoadError("expected " + std::to_string(w) + " mask entries", lineno);
      for (int c = 1; c <= w; ++c)
        if (row[static_cast<std::size_t>(c - 1)] != 0.0) {
          const int j = c - p - 1;
          const int k = p + 1 - r;
          if (g(j, k) != 0.0)
            throw LoadError("masked coefficient has a non-zero value", lineno, static_cast<std::size_t>(c));
          g.fix(j, k);
        }
    }
    break;
  }
  return g;
}

CepstralGrid load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open grid file " + path);
  return read_grid(in);
}

void save_grid(const std::string& path, const CepstralGrid& grid) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write grid file " + path);
  write_grid(out, grid);
}

}  // namespace cepfield
