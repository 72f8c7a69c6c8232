#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cepfield/cepstral_model.hpp"
#include "cepfield/diagnostics.hpp"
#include "cepfield/errors.hpp"
#include "cepfield/estimation.hpp"
#include "cepfield/extensions.hpp"
#include "cepfield/objectives.hpp"
#include "cepfield/study.hpp"

namespace py = pybind11;
using namespace cepfield;

namespace {

AcfOptions acf_options(const std::string& method, int mesh, int truncation) {
  AcfOptions o;
  if (method == "exact")
    o.method = AcfMethod::exact;
  else if (method != "mesh")
    throw std::invalid_argument("acf must be 'mesh' or 'exact'");
  o.mesh_order = mesh;
  o.truncation = truncation;
  return o;
}

LatticeSample make_sample(const Eigen::MatrixXd& y, const std::string& design) {
  return LatticeSample(y, parse_design(design));
}

py::dict fit_dict(const FitResult& f) {
  py::dict d;
  d["method"] = std::string(to_string(f.method));
  d["theta"] = f.theta;
  d["beta"] = f.beta;
  d["se_theta"] = f.se_theta;
  d["se_beta"] = f.se_beta;
  d["theta_matrix"] = f.grid.as_matrix();
  d["grid"] = f.grid;
  d["loglik"] = f.loglik;
  d["objective"] = f.objective;
  d["converged"] = f.converged;
  d["warnings"] = f.warnings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cepstral random fields on two-dimensional lattices";

  py::register_exception<Error>(m, "CepfieldError", PyExc_RuntimeError);

  py::class_<CepstralGrid>(m, "CepstralGrid")
      .def(py::init<int>(), py::arg("order"))
      .def_property_readonly("order", &CepstralGrid::order)
      .def("__getitem__", [](const CepstralGrid& g, std::pair<int, int> jk) { return g(jk.first, jk.second); })
      .def("__setitem__",
           [](CepstralGrid& g, std::pair<int, int> jk, double v) { g.set(jk.first, jk.second, v); })
      .def("fix", &CepstralGrid::fix)
      .def("is_fixed", &CepstralGrid::is_fixed)
      .def("apply", [](CepstralGrid& g, const std::string& s) { g.apply(parse_submodel(s)); })
      .def("free_count", &CepstralGrid::free_count)
      .def("free_values", &CepstralGrid::free_values)
      .def("set_free_values", py::overload_cast<const Eigen::VectorXd&>(&CepstralGrid::set_free_values))
      .def("as_matrix", &CepstralGrid::as_matrix)
      .def_static("from_matrix", &CepstralGrid::from_matrix)
      .def("__repr__", [](const CepstralGrid& g) { return "<CepstralGrid order=" + std::to_string(g.order()) + ">"; });

  m.def("spectrum_on_mesh", [](const CepstralGrid& g, int M) { return spectrum_on_mesh(g, M).values; },
        py::arg("grid"), py::arg("M"), "F on (pi u/M, pi v/M), -M <= u, v <= M");
  m.def("acf_mesh", [](const CepstralGrid& g, int M, int H) { return acf_mesh(g, M, H).gamma; },
        py::arg("grid"), py::arg("M") = 200, py::arg("H"), "gamma[h + H, k + H] by mesh quadrature");
  m.def("acf_exact", [](const CepstralGrid& g, int H, int K) { return acf_exact(g, H, K).gamma; },
        py::arg("grid"), py::arg("H"), py::arg("K") = kDefaultTruncation,
        "gamma[h + H, k + H] from the moving-average factorization");
  m.def(
      "cepstral_to_ma",
      [](const CepstralGrid& g, int K) {
        const MaCoefficients ma = cepstral_to_ma(g, K);
        py::dict d;
        d["psi"] = ma.psi;
        d["phi"] = ma.phi;
        d["xi"] = ma.xi;
        d["omega"] = ma.omega;
        d["tail_ok"] = ma.tail_ok;
        return d;
      },
      py::arg("grid"), py::arg("K") = kDefaultTruncation);

  m.def(
      "gaussian_loglik",
      [](const Eigen::MatrixXd& y, const CepstralGrid& g, const Eigen::VectorXd& beta, const std::string& design,
         const std::string& acf, int mesh) {
        return gaussian_loglik(make_sample(y, design), g, beta, acf_options(acf, mesh, kDefaultTruncation));
      },
      py::arg("y"), py::arg("grid"), py::arg("beta"), py::arg("design") = "constant", py::arg("acf") = "mesh",
      py::arg("mesh") = 200);
  m.def(
      "whittle_exact",
      [](const Eigen::MatrixXd& y, const CepstralGrid& g, const Eigen::VectorXd& beta, const std::string& design) {
        const LatticeSample s = make_sample(y, design);
        return whittle_exact(sample_acf(s, beta), g);
      },
      py::arg("y"), py::arg("grid"), py::arg("beta"), py::arg("design") = "constant");
  m.def(
      "missing_loglik",
      [](const Eigen::MatrixXd& y, const CepstralGrid& g, const Eigen::VectorXd& beta, const std::string& design) {
        const SelectionMap sel = SelectionMap::from_nan(y);
        const Eigen::MatrixXd filled = y.unaryExpr([](double v) { return std::isnan(v) ? 0.0 : v; });
        return missing_loglik(make_sample(filled, design), sel, g, beta);
      },
      py::arg("y"), py::arg("grid"), py::arg("beta"), py::arg("design") = "constant",
      "NaN cells are treated as missing");

  m.def(
      "fit",
      [](const Eigen::MatrixXd& y, int order, const std::string& method, const std::string& design,
         const std::string& submodel, bool standard_errors, const std::string& acf, int mesh) {
        CepstralGrid g(order);
        g.apply(parse_submodel(submodel));
        FitOptions o;
        o.standard_errors = standard_errors;
        o.acf = acf_options(acf, mesh, kDefaultTruncation);
        const LatticeSample s = make_sample(y, design);
        FitResult f;
        {
          py::gil_scoped_release release;
          f = fit(s, g, parse_method(method), o);
        }
        py::dict d = fit_dict(f);
        const InfoCriteria ic = info_criteria(f, s);
        d["aic"] = ic.aic;
        d["bic"] = ic.bic;
        d["hq"] = ic.hq;
        return d;
      },
      py::arg("y"), py::arg("order"), py::arg("method") = "mle", py::arg("design") = "constant+rowcol",
      py::arg("submodel") = "full", py::arg("standard_errors") = true, py::arg("acf") = "mesh",
      py::arg("mesh") = 200);

  m.def(
      "mcmc",
      [](const Eigen::MatrixXd& y, int order, const std::string& design, int n_iter, int burn_in,
         double proposal_scale, std::uint64_t seed) {
        McmcConfig c;
        c.n_iter = n_iter;
        c.burn_in = burn_in;
        c.proposal_scale = proposal_scale;
        c.seed = seed;
        McmcResult r;
        {
          py::gil_scoped_release release;
          r = mcmc_fit(make_sample(y, design), CepstralGrid(order), c);
        }
        py::dict d = fit_dict(r.fit);
        d["draws"] = r.draws;
        d["acceptance_rate"] = r.acceptance_rate;
        return d;
      },
      py::arg("y"), py::arg("order"), py::arg("design") = "constant", py::arg("n_iter") = 20000,
      py::arg("burn_in") = 5000, py::arg("proposal_scale") = 0.1, py::arg("seed") = 1);

  m.def(
      "simulate",
      [](const CepstralGrid& g, const Eigen::VectorXd& beta, int n_rows, int n_cols, const std::string& design,
         std::uint64_t seed) {
        StudyConfig c;
        c.truth = g;
        c.beta = beta;
        c.n_rows = n_rows;
        c.n_cols = n_cols;
        c.design = parse_design(design);
        return simulate_sample(c, seed).grid();
      },
      py::arg("grid"), py::arg("beta"), py::arg("n_rows"), py::arg("n_cols"), py::arg("design") = "constant",
      py::arg("seed") = 1);

  m.def(
      "info_criteria",
      [](double nll, std::size_t k, std::size_t n) {
        const InfoCriteria c = info_criteria(nll, k, n);
        return py::dict(py::arg("aic") = c.aic, py::arg("bic") = c.bic, py::arg("hq") = c.hq);
      },
      py::arg("neg_log_lik"), py::arg("k"), py::arg("n"));
  m.def(
      "morans_i",
      [](const Eigen::MatrixXd& y, int permutations, std::uint64_t seed) {
        const MoranResult r = morans_i(y, permutations, seed);
        return py::dict(py::arg("i") = r.i_stat, py::arg("expected") = r.expected, py::arg("variance") = r.variance,
                        py::arg("z") = r.z, py::arg("p_value") = r.p_value);
      },
      py::arg("y"), py::arg("permutations") = 0, py::arg("seed") = 1);

  m.def(
      "extract_signal",
      [](const Eigen::MatrixXd& y, const CepstralGrid& signal, const CepstralGrid& noise,
         const Eigen::VectorXd& beta, const std::string& design, std::vector<bool> assign) {
        const SelectionMap sel = SelectionMap::from_nan(y);
        const Eigen::MatrixXd filled = y.unaryExpr([](double v) { return std::isnan(v) ? 0.0 : v; });
        const LatticeSample s = make_sample(filled, design);
        if (assign.empty()) assign.assign(static_cast<std::size_t>(s.n_regressors()), true);
        const SignalExtraction e = extract_signal(s, {signal, noise, beta, assign}, sel);
        return py::make_tuple(e.mean, e.std_error);
      },
      py::arg("y"), py::arg("signal"), py::arg("noise"), py::arg("beta"), py::arg("design") = "constant",
      py::arg("assign") = std::vector<bool>{});
}
