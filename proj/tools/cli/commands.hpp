#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace cepfield::cli {

/// Every setting a command can read. Each subcommand registers the subset
/// it uses; the rest keep their defaults and stay out of the config hash.
struct RunConfig {
  std::string command;
  std::string data;
  std::string out = ".";
  std::string grid;  // coefficient file for simulate/study
  std::string signal;
  std::string noise;
  std::string mask;  // grid file whose fixed entries define the mask
  std::string beta;  // comma separated
  std::string assign;
  std::string orders = "1,2,3";
  std::string designs = "constant+rowcol,constant";
  std::vector<std::string> inputs;
  int order = 1;
  std::string submodel = "full";
  std::string method = "mle";
  std::string design = "constant+rowcol";
  std::string acf = "mesh";
  int mesh = 200;
  int truncation = 25;
  int whittle_mesh = 0;
  std::uint64_t seed = 1;
  int rows = 20;
  int cols = 25;
  int replicates = 1;
  unsigned threads = 0;
  int mcmc_iter = 20000;
  int mcmc_burn = 5000;
  double mcmc_scale = 1.0;
  bool standard_errors = true;
  int permutations = 0;
  int cell = 16;
  std::string png = "lattice.png";
};

/// key=value lines; '#' starts a comment. Keys may use '_' or '-'.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Runs one subcommand. `args` excludes the program name. Returns the
/// process exit code; messages go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cepfield::cli
