// Acceptance checks against the Mercer-Hall straw-yield lattice (20 x 25).
// Reads data/mercer_hall_straw.csv, or the path given as the first argument.
// Every criterion fails while the file is absent.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "cepfield/diagnostics.hpp"
#include "cepfield/errors.hpp"
#include "cepfield/estimation.hpp"
#include "harness.hpp"
#include "reference_values.hpp"

#ifndef CEPFIELD_SOURCE_DIR
#define CEPFIELD_SOURCE_DIR "."
#endif

using namespace cepfield;
using acceptance::fmt;
using acceptance::Outcome;

namespace {

std::string data_path;

LatticeSample load(DesignSpec d) {
  if (!std::filesystem::exists(data_path)) throw Error("data file " + data_path + " not found");
  LatticeSample s = load_csv(data_path, d);
  if (s.n_rows() != 20 || s.n_cols() != 25)
    throw Error("expected a 20 x 25 lattice, found " + std::to_string(s.n_rows()) + " x " +
                std::to_string(s.n_cols()));
  return s;
}

struct Model {
  InfoCriteria ic;
  FitResult fit;
};

// Fits p = 1..3 with and without trend once and shares them.
const std::vector<Model>& models() {
  static std::vector<Model> cache;
  if (!cache.empty()) return cache;
  for (DesignSpec d : {DesignSpec::constant_rowcol, DesignSpec::constant}) {
    const LatticeSample s = load(d);
    for (int p = 1; p <= 3; ++p) {
      FitOptions o;
      o.standard_errors = d == DesignSpec::constant_rowcol && p == 2;
      const FitResult f = fit(s, CepstralGrid(p), Method::mle, o);
      cache.push_back({info_criteria(f, s), f});
    }
  }
  return cache;
}

std::vector<int> ranking(const std::vector<double>& v) {
  std::vector<int> r(v.size());
  std::iota(r.begin(), r.end(), 0);
  std::sort(r.begin(), r.end(), [&](int a, int b) { return v[a] < v[b]; });
  return r;
}

Outcome table_of_criteria() {
  const auto& m = models();
  std::vector<double> nll_ref, aic_ref, bic_ref, hq_ref, aic, bic, hq;
  for (int t = 0; t < 2; ++t)
    for (int p = 0; p < 3; ++p) {
      nll_ref.push_back(t == 0 ? reference::kStrawNllTrend[p] : reference::kStrawNllNoTrend[p]);
      aic_ref.push_back(t == 0 ? reference::kStrawAicTrend[p] : reference::kStrawAicNoTrend[p]);
      bic_ref.push_back(t == 0 ? reference::kStrawBicTrend[p] : reference::kStrawBicNoTrend[p]);
      hq_ref.push_back(t == 0 ? reference::kStrawHqTrend[p] : reference::kStrawHqNoTrend[p]);
    }
  double worst = 0.0;
  std::string values;
  for (std::size_t i = 0; i < m.size(); ++i) {
    worst = std::max(worst, std::abs(m[i].ic.neg_log_lik - nll_ref[i]));
    values += (i ? " " : "") + fmt("%.3f", m[i].ic.neg_log_lik);
    aic.push_back(m[i].ic.aic);
    bic.push_back(m[i].ic.bic);
    hq.push_back(m[i].ic.hq);
  }
  const bool same_rank = ranking(aic) == ranking(aic_ref) && ranking(bic) == ranking(bic_ref) &&
                         ranking(hq) == ranking(hq_ref);
  const bool p2_best = ranking(bic).front() == 1 && ranking(hq).front() == 1;
  return {worst <= 0.5 && same_rank && p2_best,
          "-log L " + values + ", max deviation " + fmt("%.3f", worst) + (same_rank ? ", ranking matches" : ", ranking differs") +
              (p2_best ? "" : ", p=2 trend model not BIC/HQ best")};
}

Outcome table_of_estimates() {
  const FitResult& f = models()[1].fit;
  const std::vector<Eigen::Index> idx = acceptance::vec_to_canonical(f.grid);
  double d_theta = 0.0, d_se = 0.0, d_b0 = 0.0, d_b12 = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    d_theta = std::max(d_theta, std::abs(f.theta[idx[i]] - reference::kStrawTheta[i]));
    d_se = std::max(d_se, std::abs(f.se_theta[idx[i]] - reference::kStrawThetaSe[i]));
  }
  for (int b = 0; b < 3; ++b) {
    d_se = std::max(d_se, std::abs(f.se_beta[b] - reference::kStrawBetaSe[b]));
    (b == 0 ? d_b0 : d_b12) = std::max(b == 0 ? d_b0 : d_b12, std::abs(f.beta[b] - reference::kStrawBeta[b]));
  }
  const bool pass = d_theta <= 0.02 && d_b0 <= 0.05 && d_b12 <= 0.002 && d_se <= 0.01;
  return {pass, "max deviations: theta " + fmt("%.4f", d_theta) + ", beta0 " + fmt("%.4f", d_b0) +
                    ", beta1/2 " + fmt("%.4f", d_b12) + ", se " + fmt("%.4f", d_se)};
}

Outcome raw_moran() {
  const MoranResult m = morans_i(load(DesignSpec::constant).grid());
  return {m.p_value < 1e-10, "raw data I = " + fmt("%.4f", m.i_stat) + ", p = " + fmt("%.3g", m.p_value)};
}

}  // namespace

int main(int argc, char** argv) {
  data_path = argc > 1 ? argv[1] : std::string(CEPFIELD_SOURCE_DIR) + "/data/mercer_hall_straw.csv";
  const std::vector<acceptance::Criterion> criteria = {
      {"5", "straw-yield information criteria", 600, table_of_criteria},
      {"6", "straw-yield p=2 trend estimates", 0, table_of_estimates},
      {"9b", "Moran's I of the raw straw yields", 0, raw_moran},
  };
  return acceptance::run_all(criteria, {}) == 0 ? 0 : 1;
}
