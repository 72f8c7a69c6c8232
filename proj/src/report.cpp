#include "cepfield/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "cepfield/errors.hpp"

namespace cepfield {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(std::string_view text) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
  return buf;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<std::string> theta_names(const CepstralGrid& grid) {
  std::vector<std::string> names;
  for (const Lag& l : grid.free_positions())
    names.push_back("theta[" + std::to_string(l.j) + "," + std::to_string(l.k) + "]");
  return names;
}

namespace {

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

Lag canonical(Lag l) { return is_canonical(l) ? l : Lag{-l.j, -l.k}; }

}  // namespace

std::string estimates_table(const FitResult& fit, const std::vector<std::string>& beta_names) {
  const std::vector<Lag> free = fit.grid.free_positions();
  const bool have_se = fit.se_theta.size() == static_cast<Eigen::Index>(free.size());
  std::ostringstream os;
  os << std::left << std::setw(12) << "parameter" << std::right << std::setw(12) << "estimate"
     << std::setw(12) << "se" << "\n";
  const std::vector<Lag> vec = vec_positions(fit.grid.order());
  for (std::size_t i = 0; i < vec.size(); ++i) {
    const Lag c = canonical(vec[i]);
    const auto it = std::find(free.begin(), free.end(), c);
    os << std::left << std::setw(12) << ("theta_" + std::to_string(i + 1)) << std::right;
    if (it == free.end()) {
      os << std::setw(12) << fixed(0.0, 3) << std::setw(12) << "-" << "\n";
      continue;
    }
    const auto idx = static_cast<Eigen::Index>(it - free.begin());
    os << std::setw(12) << fixed(fit.theta[idx], 3) << std::setw(12)
       << (have_se ? fixed(fit.se_theta[idx], 3) : std::string("-")) << "\n";
  }
  for (Eigen::Index i = 0; i < fit.beta.size(); ++i) {
    const std::string name = i < static_cast<Eigen::Index>(beta_names.size())
                                 ? beta_names[i]
                                 : "beta_" + std::to_string(i);
    os << std::left << std::setw(12) << name << std::right << std::setw(12) << fixed(fit.beta[i], 4)
       << std::setw(12)
       << (fit.se_beta.size() == fit.beta.size() ? fixed(fit.se_beta[i], 4) : std::string("-"))
       << "\n";
  }
  return os.str();
}

std::string criteria_table(const std::vector<CriteriaRow>& rows) {
  if (rows.empty()) return {};
  auto best = [&](auto field) {
    std::size_t b = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (field(rows[i].ic) < field(rows[b].ic)) b = i;
    return b;
  };
  const std::size_t ba = best([](const InfoCriteria& c) { return c.aic; });
  const std::size_t bb = best([](const InfoCriteria& c) { return c.bic; });
  const std::size_t bh = best([](const InfoCriteria& c) { return c.hq; });
  std::ostringstream os;
  os << std::left << std::setw(16) << "model" << std::right << std::setw(6) << "k" << std::setw(12)
     << "-log L" << std::setw(13) << "AIC" << std::setw(13) << "BIC" << std::setw(13) << "HQ"
     << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const InfoCriteria& c = rows[i].ic;
    auto mark = [&](double v, bool star) { return fixed(v, 3) + (star ? "*" : " "); };
    os << std::left << std::setw(16) << rows[i].label << std::right << std::setw(6) << c.k
       << std::setw(12) << fixed(c.neg_log_lik, 3) << std::setw(13) << mark(c.aic, i == ba)
       << std::setw(13) << mark(c.bic, i == bb) << std::setw(13) << mark(c.hq, i == bh) << "\n";
  }
  return os.str();
}

std::string fit_report(const FitResult& fit, const LatticeSample& sample, const InfoCriteria& ic,
                       const std::optional<MoranResult>& moran) {
  std::ostringstream os;
  os << "method: " << to_string(fit.method) << "\n";
  os << "lattice: " << sample.n_rows() << " x " << sample.n_cols() << "\n";
  os << "order: " << fit.grid.order() << "\n";
  os << "converged: " << (fit.converged ? "yes" : "no") << "\n";
  os << "objective: " << std::setprecision(10) << fit.objective << "\n";
  os << "\n" << estimates_table(fit, sample.names()) << "\n";
  os << "-log L: " << fixed(ic.neg_log_lik, 3) << "\n";
  os << "k: " << ic.k << "  n: " << ic.n << "\n";
  os << "AIC: " << fixed(ic.aic, 3) << "  BIC: " << fixed(ic.bic, 3) << "  HQ: " << fixed(ic.hq, 3)
     << "\n";
  if (moran) {
    os << "Moran's I (whitened residuals): " << fixed(moran->i_stat, 4) << "  z = " << fixed(moran->z, 3)
       << "  p = " << std::setprecision(4) << moran->p_value << "\n";
  }
  for (const std::string& w : fit.warnings) os << "warning: " << w << "\n";
  return os.str();
}

namespace {

std::vector<double> as_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

nlohmann::json to_json(const FitResult& fit, const LatticeSample& sample, const InfoCriteria& ic,
                       const std::optional<MoranResult>& moran) {
  nlohmann::json j;
  j["method"] = std::string(to_string(fit.method));
  j["n_rows"] = sample.n_rows();
  j["n_cols"] = sample.n_cols();
  j["order"] = fit.grid.order();
  j["converged"] = fit.converged;
  j["objective"] = fit.objective;
  j["loglik"] = fit.loglik;
  j["theta_names"] = theta_names(fit.grid);
  j["theta"] = as_vector(fit.theta);
  j["se_theta"] = as_vector(fit.se_theta);
  j["beta_names"] = sample.names();
  j["beta"] = as_vector(fit.beta);
  j["se_beta"] = as_vector(fit.se_beta);
  std::vector<std::vector<double>> rows;
  const Eigen::MatrixXd m = fit.grid.as_matrix();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(as_vector(m.row(r).transpose()));
  j["theta_matrix"] = rows;
  j["criteria"] = {{"k", ic.k}, {"n", ic.n}, {"neg_log_lik", ic.neg_log_lik},
                   {"aic", ic.aic}, {"bic", ic.bic}, {"hq", ic.hq}};
  if (moran)
    j["moran"] = {{"i", moran->i_stat}, {"expected", moran->expected},
                  {"variance", moran->variance}, {"z", moran->z}, {"p_value", moran->p_value}};
  nlohmann::json trace = nlohmann::json::array();
  for (const IterationRecord& r : fit.trace)
    trace.push_back({{"outer", r.outer}, {"inner_iterations", r.inner_iterations},
                     {"objective", r.objective}, {"change", r.change}});
  j["trace"] = trace;
  j["warnings"] = fit.warnings;
  return j;
}

std::string draws_csv(const Eigen::MatrixXd& draws, const std::vector<std::string>& names) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < names.size(); ++i) os << (i ? "," : "") << names[i];
  os << "\n";
  for (Eigen::Index r = 0; r < draws.rows(); ++r) {
    for (Eigen::Index c = 0; c < draws.cols(); ++c) os << (c ? "," : "") << draws(r, c);
    os << "\n";
  }
  return os.str();
}

}  // namespace cepfield
