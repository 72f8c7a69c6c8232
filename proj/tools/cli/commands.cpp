#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cepfield/diagnostics.hpp"
#include "cepfield/errors.hpp"
#include "cepfield/estimation.hpp"
#include "cepfield/extensions.hpp"
#include "cepfield/report.hpp"
#include "cepfield/study.hpp"
#include "png_image.hpp"

namespace fs = std::filesystem;

namespace cepfield::cli {

namespace {

constexpr int kExitRuntime = 2;
constexpr int kExitNotConverged = 3;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  for (const std::string& item : split(text)) {
    T v{};
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || end != item.data() + item.size())
      throw std::invalid_argument(std::string("bad ") + what + " entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

struct Context {
  RunConfig cfg;
  std::string hash;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;

  std::string header() const { return "# cepfield " + cfg.command + " config=" + hash + "\n"; }

  fs::path output(const std::string& name) const {
    fs::create_directories(cfg.out);
    return fs::path(cfg.out) / name;
  }

  void write_grid_csv(const std::string& name, const Eigen::MatrixXd& grid) const {
    std::ostringstream os;
    os << header();
    write_csv_grid(os, grid);
    write_atomic(output(name), os.str());
  }

  AcfOptions acf() const {
    AcfOptions a;
    if (cfg.acf == "mesh")
      a.method = AcfMethod::mesh;
    else if (cfg.acf == "exact")
      a.method = AcfMethod::exact;
    else
      throw std::invalid_argument("unknown acf method '" + cfg.acf + "' (expected mesh or exact)");
    a.mesh_order = cfg.mesh;
    a.truncation = cfg.truncation;
    return a;
  }

  FitOptions fit_options() const {
    FitOptions o;
    o.acf = acf();
    o.whittle_mesh = cfg.whittle_mesh;
    o.standard_errors = cfg.standard_errors;
    return o;
  }

  CepstralGrid structure() const {
    if (cfg.order < 0) throw std::invalid_argument("order must be non-negative");
    CepstralGrid g(cfg.order);
    g.apply(parse_submodel(cfg.submodel));
    if (!cfg.mask.empty()) {
      const CepstralGrid m = load_grid(cfg.mask);
      if (m.order() != cfg.order)
        throw std::invalid_argument("mask file has order " + std::to_string(m.order()) +
                                    ", expected " + std::to_string(cfg.order));
      for (int j = -cfg.order; j <= cfg.order; ++j)
        for (int k = -cfg.order; k <= cfg.order; ++k)
          if (m.is_fixed(j, k)) g.fix(j, k);
    }
    return g;
  }

  LatticeSample load_complete(DesignSpec d) const {
    if (cfg.data.empty()) throw std::invalid_argument("--data is required");
    LatticeSample s = load_csv(cfg.data, d);
    if (!s.grid().allFinite())
      throw LoadError(cfg.data + " has missing cells; fitting needs a complete lattice");
    return s;
  }

  Eigen::VectorXd beta(Eigen::Index expected) const {
    const Eigen::VectorXd b = to_vector(parse_list<double>(cfg.beta, "beta"));
    if (b.size() != expected)
      throw std::invalid_argument("--beta has " + std::to_string(b.size()) + " values, design has " +
                                  std::to_string(expected) + " columns");
    return b;
  }
};

FitResult bayes_fit(const Context& ctx, const LatticeSample& sample, const CepstralGrid& structure,
                    Eigen::MatrixXd& draws) {
  FitOptions o = ctx.fit_options();
  o.standard_errors = true;
  const FitResult mle = fit(sample, structure, Method::mle, o);
  const Eigen::Index d = static_cast<Eigen::Index>(mle.parameter_count());
  McmcConfig mc;
  mc.n_iter = ctx.cfg.mcmc_iter;
  mc.burn_in = ctx.cfg.mcmc_burn;
  mc.proposal_scale = ctx.cfg.mcmc_scale;
  mc.seed = ctx.cfg.seed;
  mc.acf = o.acf;
  mc.proposal_cov = (2.38 * 2.38 / static_cast<double>(d)) * mle.hessian.inverse();
  Eigen::VectorXd start(d);
  start << mle.theta, mle.beta;
  mc.start = start;
  McmcResult r = mcmc_fit(sample, structure, mc);
  draws = std::move(r.draws);
  r.fit.warnings.insert(r.fit.warnings.begin(),
                        "acceptance rate " + std::to_string(r.acceptance_rate));
  return r.fit;
}

int cmd_fit(const Context& ctx) {
  const LatticeSample sample = ctx.load_complete(parse_design(ctx.cfg.design));
  const CepstralGrid structure = ctx.structure();
  const Method method = parse_method(ctx.cfg.method);
  Eigen::MatrixXd draws;
  const FitResult f = method == Method::bayes ? bayes_fit(ctx, sample, structure, draws)
                                              : fit(sample, structure, method, ctx.fit_options());
  const Residuals res = residuals(f, sample, ctx.acf());
  const InfoCriteria ic = info_criteria(f, sample);

  const std::string report = ctx.header() + fit_report(f, sample, ic, res.moran);
  write_atomic(ctx.output("report.txt"), report);
  nlohmann::json j = to_json(f, sample, ic, res.moran);
  j["config_hash"] = ctx.hash;
  write_atomic(ctx.output("fit.json"), j.dump(2) + "\n");
  ctx.write_grid_csv("residuals.csv", res.grid);
  if (method == Method::bayes) {
    std::vector<std::string> names = theta_names(f.grid);
    names.insert(names.end(), sample.names().begin(), sample.names().end());
    write_atomic(ctx.output("draws.csv"), ctx.header() + draws_csv(draws, names));
  }
  *ctx.out << report;
  if (!f.converged) {
    *ctx.err << "error: fit did not converge\n";
    return kExitNotConverged;
  }
  return 0;
}

int cmd_diagnose(const Context& ctx) {
  const std::vector<int> orders = parse_list<int>(ctx.cfg.orders, "orders");
  const std::vector<std::string> designs = split(ctx.cfg.designs);
  if (orders.empty() || designs.empty()) throw std::invalid_argument("need at least one order and design");
  FitOptions o = ctx.fit_options();
  o.standard_errors = false;

  std::vector<CriteriaRow> rows;
  nlohmann::json models = nlohmann::json::array();
  std::optional<double> best_bic;
  std::string best_label;
  MoranResult best_moran;
  MoranResult raw;
  bool converged = true;
  for (const std::string& dname : designs) {
    const DesignSpec d = parse_design(dname);
    const LatticeSample sample = ctx.load_complete(d);
    raw = morans_i(sample.grid(), ctx.cfg.permutations, ctx.cfg.seed);
    for (int p : orders) {
      if (p < 0) throw std::invalid_argument("orders must be non-negative");
      CepstralGrid g(p);
      g.apply(parse_submodel(ctx.cfg.submodel));
      const FitResult f = fit(sample, g, Method::mle, o);
      converged = converged && f.converged;
      const InfoCriteria ic = info_criteria(f, sample);
      const std::string label = dname + " p=" + std::to_string(p);
      rows.push_back({label, ic});
      models.push_back({{"design", dname}, {"order", p}, {"k", ic.k}, {"neg_log_lik", ic.neg_log_lik},
                        {"aic", ic.aic}, {"bic", ic.bic}, {"hq", ic.hq}, {"converged", f.converged}});
      if (!best_bic || ic.bic < *best_bic) {
        best_bic = ic.bic;
        best_label = label;
        best_moran = residuals(f, sample, o.acf).moran;
      }
    }
  }

  std::ostringstream os;
  os << ctx.header() << criteria_table(rows) << "\n";
  os << "Moran's I (raw data): " << std::fixed << std::setprecision(4) << raw.i_stat
     << "  z = " << std::setprecision(3) << raw.z << "  p = " << std::defaultfloat
     << std::setprecision(4) << raw.p_value << "\n";
  os << "Moran's I (whitened residuals, " << best_label << "): " << std::fixed << std::setprecision(4)
     << best_moran.i_stat << "  z = " << std::setprecision(3) << best_moran.z
     << "  p = " << std::defaultfloat << std::setprecision(4) << best_moran.p_value << "\n";
  write_atomic(ctx.output("criteria.txt"), os.str());
  nlohmann::json j;
  j["config_hash"] = ctx.hash;
  j["models"] = models;
  j["moran_raw"] = {{"i", raw.i_stat}, {"z", raw.z}, {"p_value", raw.p_value}};
  j["best_bic"] = best_label;
  j["moran_residuals"] = {{"i", best_moran.i_stat}, {"z", best_moran.z}, {"p_value", best_moran.p_value}};
  write_atomic(ctx.output("diagnose.json"), j.dump(2) + "\n");
  *ctx.out << os.str();
  if (!converged) {
    *ctx.err << "error: at least one fit did not converge\n";
    return kExitNotConverged;
  }
  return 0;
}

int cmd_extract(const Context& ctx) {
  if (ctx.cfg.data.empty()) throw std::invalid_argument("--data is required");
  if (ctx.cfg.signal.empty() || ctx.cfg.noise.empty())
    throw std::invalid_argument("--signal and --noise grid files are required");
  std::ifstream in(ctx.cfg.data);
  if (!in) throw LoadError("cannot open " + ctx.cfg.data);
  Eigen::MatrixXd y = read_csv_grid(in);
  const SelectionMap sel = SelectionMap::from_nan(y);
  y = y.unaryExpr([](double v) { return std::isnan(v) ? 0.0 : v; });
  const LatticeSample sample(y, parse_design(ctx.cfg.design));

  SignalNoiseSpec spec;
  spec.signal = load_grid(ctx.cfg.signal);
  spec.noise = load_grid(ctx.cfg.noise);
  spec.beta = ctx.beta(sample.n_regressors());
  const std::vector<int> flags =
      ctx.cfg.assign.empty() ? std::vector<int>(sample.n_regressors(), 1) : parse_list<int>(ctx.cfg.assign, "assign");
  if (static_cast<Eigen::Index>(flags.size()) != sample.n_regressors())
    throw std::invalid_argument("--assign needs one flag per design column");
  for (int f : flags) spec.mean_assignment.push_back(f != 0);

  const SignalExtraction e = extract_signal(sample, spec, sel, ctx.acf());
  ctx.write_grid_csv("signal.csv", e.mean);
  ctx.write_grid_csv("signal_se.csv", e.std_error);
  *ctx.out << ctx.header() << "observed cells: " << sel.count() << " of " << y.size() << "\n"
           << "signal mean range: " << e.mean.minCoeff() << " .. " << e.mean.maxCoeff() << "\n"
           << "wrote " << ctx.output("signal.csv").string() << ", " << ctx.output("signal_se.csv").string()
           << "\n";
  return 0;
}

StudyConfig study_config(const Context& ctx) {
  if (ctx.cfg.grid.empty()) throw std::invalid_argument("--grid is required");
  StudyConfig s;
  s.truth = load_grid(ctx.cfg.grid);
  s.design = parse_design(ctx.cfg.design);
  s.n_rows = ctx.cfg.rows;
  s.n_cols = ctx.cfg.cols;
  if (s.n_rows < 1 || s.n_cols < 1) throw std::invalid_argument("rows and cols must be positive");
  s.beta = ctx.beta(make_design(1, 1, s.design).X.cols());
  s.replicates = ctx.cfg.replicates;
  s.seed = ctx.cfg.seed;
  s.method = parse_method(ctx.cfg.method);
  s.fit = ctx.fit_options();
  s.simulation_acf = ctx.acf();
  s.threads = ctx.cfg.threads;
  return s;
}

int cmd_simulate(const Context& ctx) {
  const StudyConfig s = study_config(ctx);
  if (s.replicates < 1) throw std::invalid_argument("replicates must be at least 1");
  const LatticeSimulator sim(s);
  for (int r = 0; r < s.replicates; ++r) {
    const std::uint64_t seed = s.seed + static_cast<std::uint64_t>(r);
    std::ostringstream name;
    name << "sim_" << std::setw(4) << std::setfill('0') << r + 1 << ".csv";
    const LatticeSample sample = sim.draw(seed);
    ctx.write_grid_csv(name.str(), sample.grid());
    *ctx.out << ctx.output(name.str()).string() << " seed=" << seed << "\n";
  }
  return 0;
}

int cmd_study(const Context& ctx) {
  const StudyConfig s = study_config(ctx);
  if (s.replicates < 2) throw std::invalid_argument("a study needs at least 2 replicates");
  const StudyResult r = run_study(s);
  const std::string table = ctx.header() + study_table(r);
  write_atomic(ctx.output("study.txt"), table);

  std::ostringstream est;
  est << ctx.header() << "replicate";
  for (const ParameterSummary& p : r.parameters) est << "," << p.name;
  est << "\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < r.estimates.rows(); ++i) {
    est << r.succeeded[static_cast<std::size_t>(i)];
    for (Eigen::Index c = 0; c < r.estimates.cols(); ++c) est << "," << r.estimates(i, c);
    est << "\n";
  }
  write_atomic(ctx.output("estimates.csv"), est.str());

  nlohmann::json j;
  j["config_hash"] = ctx.hash;
  j["replicates"] = s.replicates;
  for (const ParameterSummary& p : r.parameters)
    j["parameters"].push_back({{"name", p.name}, {"truth", p.truth}, {"mean", p.mean}, {"sd", p.sd},
                               {"bias", p.bias}, {"mse", p.mse}});
  j["failures"] = nlohmann::json::array();
  for (const ReplicateFailure& f : r.failures)
    j["failures"].push_back({{"replicate", f.replicate}, {"message", f.message}});
  write_atomic(ctx.output("study.json"), j.dump(2) + "\n");
  *ctx.out << table;
  return 0;
}

int cmd_plot(const Context& ctx) {
  if (ctx.cfg.inputs.empty()) throw std::invalid_argument("--input is required");
  std::vector<Eigen::MatrixXd> panels;
  for (const std::string& path : ctx.cfg.inputs) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open " + path);
    panels.push_back(read_csv_grid(in));
  }
  if (ctx.cfg.cell < 1) throw std::invalid_argument("cell must be positive");
  const fs::path png(ctx.cfg.png);
  if (png.has_parent_path()) fs::create_directories(png.parent_path());
  HeatmapStyle style;
  style.cell = ctx.cfg.cell;
  write_heatmaps(png, panels, style);
  *ctx.out << "wrote " << png.string() << "\n";
  return 0;
}

void add_common(CLI::App* sub, std::string& config_path) {
  sub->add_option("--config", config_path, "key=value settings file; flags win")->configurable(false);
}

void add_output(CLI::App* sub, RunConfig& c) {
  sub->add_option("--out", c.out, "output directory")->capture_default_str()->configurable(false);
}

void add_acf(CLI::App* sub, RunConfig& c) {
  sub->add_option("--acf", c.acf, "model acf algorithm: mesh or exact")->capture_default_str();
  sub->add_option("--mesh", c.mesh, "mesh order M")->capture_default_str();
  sub->add_option("--truncation", c.truncation, "MA truncation K")->capture_default_str();
}

void add_fit(CLI::App* sub, RunConfig& c) {
  sub->add_option("--method", c.method, "mle, qmle_exact, qmle_approx or bayes")->capture_default_str();
  sub->add_option("--whittle-mesh", c.whittle_mesh, "approximate Whittle mesh; 0 = lattice size")
      ->capture_default_str();
  sub->add_option("--se", c.standard_errors, "compute standard errors")->capture_default_str();
}

void add_model(CLI::App* sub, RunConfig& c) {
  sub->add_option("--grid", c.grid, "coefficient file of the generating model");
  sub->add_option("--beta", c.beta, "regression coefficients, comma separated");
  sub->add_option("--rows", c.rows, "lattice rows")->capture_default_str();
  sub->add_option("--cols", c.cols, "lattice columns")->capture_default_str();
  sub->add_option("--replicates", c.replicates, "number of simulated lattices")->capture_default_str();
  sub->add_option("--seed", c.seed, "base seed; replicate r uses seed + r")->capture_default_str();
}

std::vector<std::string> with_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.empty()) return args;
  std::vector<std::string> out{args.front()};
  for (const auto& [key, value] : read_config_file(path)) {
    if (key == "command" || key == "config") continue;
    out.push_back("--" + key + "=" + value);
  }
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw LoadError("expected key=value in " + path, lineno);
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.empty()) throw LoadError("empty key in " + path, lineno);
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Context ctx;
  ctx.out = &out;
  ctx.err = &err;
  RunConfig& c = ctx.cfg;
  std::string config_path;

  CLI::App app{"Cepstral random fields on two-dimensional lattices", "cepfield"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  auto* fit_cmd = app.add_subcommand("fit", "fit a cepstral model to a lattice");
  auto* diag_cmd = app.add_subcommand("diagnose", "information criteria over orders and designs, Moran's I");
  auto* ext_cmd = app.add_subcommand("extract", "signal extraction from signal plus noise");
  auto* sim_cmd = app.add_subcommand("simulate", "simulate lattices from a coefficient file");
  auto* study_cmd = app.add_subcommand("study", "simulation study: simulate and refit replicates");
  auto* plot_cmd = app.add_subcommand("plot", "heatmap PNG of one or more lattice CSV files");

  for (auto* s : {fit_cmd, diag_cmd, ext_cmd, sim_cmd, study_cmd, plot_cmd}) add_common(s, config_path);
  for (auto* s : {fit_cmd, diag_cmd, ext_cmd, sim_cmd, study_cmd}) add_output(s, c);
  for (auto* s : {fit_cmd, diag_cmd, ext_cmd})
    s->add_option("--data", c.data, "lattice CSV, rows = lattice rows");
  for (auto* s : {fit_cmd, ext_cmd, sim_cmd, study_cmd})
    s->add_option("--design", c.design, "none, constant or constant+rowcol")->capture_default_str();
  for (auto* s : {fit_cmd, diag_cmd, ext_cmd, sim_cmd, study_cmd}) add_acf(s, c);

  fit_cmd->add_option("--order", c.order, "cepstral order p")->capture_default_str();
  fit_cmd->add_option("--submodel", c.submodel, "full, quadrant or separable")->capture_default_str();
  fit_cmd->add_option("--mask", c.mask, "grid file; its fixed entries are held at zero");
  fit_cmd->add_option("--seed", c.seed, "MCMC seed")->capture_default_str();
  fit_cmd->add_option("--mcmc-iter", c.mcmc_iter, "MCMC iterations")->capture_default_str();
  fit_cmd->add_option("--mcmc-burn", c.mcmc_burn, "MCMC burn-in")->capture_default_str();
  fit_cmd->add_option("--mcmc-scale", c.mcmc_scale, "MCMC proposal scale")->capture_default_str();
  add_fit(fit_cmd, c);

  diag_cmd->add_option("--orders", c.orders, "orders to compare")->capture_default_str();
  diag_cmd->add_option("--designs", c.designs, "designs to compare")->capture_default_str();
  diag_cmd->add_option("--submodel", c.submodel, "full, quadrant or separable")->capture_default_str();
  diag_cmd->add_option("--permutations", c.permutations, "Moran permutation count; 0 = normal approximation")
      ->capture_default_str();
  diag_cmd->add_option("--seed", c.seed, "permutation seed")->capture_default_str();

  ext_cmd->add_option("--signal", c.signal, "signal coefficient file");
  ext_cmd->add_option("--noise", c.noise, "noise coefficient file");
  ext_cmd->add_option("--beta", c.beta, "regression coefficients, comma separated");
  ext_cmd->add_option("--assign", c.assign, "1 per design column assigned to the signal mean");

  add_model(sim_cmd, c);
  add_model(study_cmd, c);
  add_fit(study_cmd, c);
  study_cmd->add_option("--threads", c.threads, "worker threads; 0 = all cores")->capture_default_str();

  plot_cmd->add_option("--input", c.inputs, "lattice CSV files, one panel each")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  plot_cmd->add_option("--png", c.png, "output image")->capture_default_str();
  plot_cmd->add_option("--cell", c.cell, "pixels per cell")->capture_default_str();

  try {
    std::vector<std::string> args = with_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }

  CLI::App* sub = app.get_subcommands().front();
  c.command = sub->get_name();
  ctx.hash = config_hash(c.command + "\n" + sub->config_to_str(true, false));

  try {
    if (sub == fit_cmd) return cmd_fit(ctx);
    if (sub == diag_cmd) return cmd_diagnose(ctx);
    if (sub == ext_cmd) return cmd_extract(ctx);
    if (sub == sim_cmd) return cmd_simulate(ctx);
    if (sub == study_cmd) return cmd_study(ctx);
    return cmd_plot(ctx);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace cepfield::cli
