// revb: command-line front end.
//
//   revb <state|observables|verify|series-check|zeros> [options]
//
// A --config FILE holds key=value lines (keys are the long option names
// without dashes, '#' starts a comment). Its values are applied first, so
// anything given on the command line wins.

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "revb/cli.hpp"

namespace {

using revb::cli::RunConfig;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Turns the config file into "--key value" pairs.
std::vector<std::string> read_config_args(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw revb::cli::io_error("cannot read config file '" + path + "'");
  std::vector<std::string> args;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty() || key == "config") {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": bad key '" + key + "'");
    }
    args.push_back("--" + key);
    args.push_back(trim(line.substr(eq + 1)));
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> user(argv + 1, argv + argc);

  // --config is resolved before the main parse so file values can be prepended.
  std::string config_path;
  for (std::size_t i = 0; i < user.size(); ++i) {
    if (user[i] == "--config" && i + 1 < user.size()) {
      config_path = user[i + 1];
    } else if (user[i].starts_with("--config=")) {
      config_path = user[i].substr(9);
    }
  }
  std::vector<std::string> args;
  try {
    if (!config_path.empty()) args = read_config_args(config_path);
  } catch (const revb::cli::io_error& e) {
    std::cerr << "revb: I/O error: " << e.what() << '\n';
    return revb::cli::kIoError;
  } catch (const std::exception& e) {
    std::cerr << "revb: bad input: " << e.what() << '\n';
    return revb::cli::kBadInput;
  }
  args.insert(args.end(), user.begin(), user.end());

  CLI::App app{"Bessel-spinor electron vortex states: construction, operator checks and observables", "revb"};
  app.set_version_flag("--version", std::string(revb::cli::kToolVersion));
  app.require_subcommand(1, 1);
  for (const char* name : {"state", "observables", "verify", "series-check", "zeros"}) {
    app.add_subcommand(name)->fallthrough();
  }
  app.get_subcommand("state")->description("sample the normalised state on the radial grid");
  app.get_subcommand("observables")->description("I1, Delta_n, <L_z>, <S_z> and helicity per n");
  app.get_subcommand("verify")->description("operator eigenvalue residuals and cross-checks; exit 1 on failure");
  app.get_subcommand("series-check")->description("power-series solver against Bessel functions");
  app.get_subcommand("zeros")->description("first positive zeros of J_order");

  RunConfig cfg;
  std::string n_range, branch = "+", cutoff = "jn", format = "csv";
  app.add_option("--n", cfg.n, "vortex index of the first component");
  app.add_option("--n-range", n_range, "inclusive range A..B (batch commands)");
  app.add_option("--kappa", cfg.kappa, "transverse momentum (> 0)");
  app.add_option("--kz", cfg.k_z, "longitudinal momentum");
  app.add_option("--branch", branch, "K branch: + or -");
  app.add_option("--mass", cfg.mass, "rest mass");
  app.add_option("--D", cfg.length, "beam length along z");
  app.add_option("--cutoff", cutoff, "jn | jn1 | radius=R");
  app.add_option("--grid", cfg.grid, "radial grid points (finest level)");
  app.add_option("--levels", cfg.levels, "grid refinement levels (>= 2)");
  app.add_option("--tol", cfg.tol, "quadrature absolute tolerance");
  app.add_option("--format", format, "csv | json");
  app.add_option("--out", cfg.out, "output path (default stdout)");
  app.add_option("--config", config_path, "key=value config file");
  app.add_option("--threads", cfg.threads, "worker threads (output does not depend on it)");
  app.add_option("--angles", cfg.angles, "angular samples per radius (state)");
  app.add_option("--K", cfg.series_terms, "series terms (series-check)");
  app.add_option("--energy-offset", cfg.energy_offset, "shift added to E in the H check (negative control)");
  app.add_option("--coefficients", cfg.coefficients_out, "coefficient table path (series-check)");
  for (auto* opt : app.get_options()) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return revb::cli::kBadInput;
  }

  try {
    cfg.command = revb::cli::parse_command(app.get_subcommands().front()->get_name());
    cfg.branch = revb::parse_branch(branch);
    cfg.cutoff = revb::cli::parse_cutoff(cutoff);
    cfg.format = revb::cli::parse_format(format);
    if (!n_range.empty()) cfg.n_range = revb::cli::parse_n_range(n_range);
  } catch (const std::exception& e) {
    std::cerr << "revb: bad input: " << e.what() << '\n';
    return revb::cli::kBadInput;
  }
  const bool n_given = app.count("--n") > 0;
  return revb::cli::run(cfg, std::cerr, n_given);
}
