// lpmhd: command-line driver for the experiments.
//
//   lpmhd <experiment> [--config file.json] [--flag value ...]
//   lpmhd run <experiment> ...
//
// Flags override fields of the config document. Exit codes: 0 ok, 1 usage,
// 2 configuration, 3 numerical failure, 4 blow-up, 5 empty window.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lpmhd/experiments.hpp"
#include "lpmhd/parallel.hpp"

using namespace lpmhd;

namespace {

std::string list_experiments() {
  std::string s;
  for (const auto& n : experiment_names()) s += "  " + n + "\n";
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Littlewood-Paley / MHD numerical experiments"};
  app.footer("experiments:\n" + list_experiments());

  std::vector<std::string> positional;
  std::string config_path;
  Json flags = Json::object();

  app.add_option("experiment", positional, "experiment name, optionally preceded by 'run'")->expected(1, 2);
  app.add_option("--config", config_path, "JSON config document")->check(CLI::ExistingFile);

  // Each flag writes straight into the override document.
  auto int_flag = [&](const std::string& name, const std::string& key, const std::string& help) {
    app.add_option_function<long long>(name, [&flags, key](const long long& v) { flags[key] = v; }, help);
  };
  auto real_flag = [&](const std::string& name, const std::string& key, const std::string& help) {
    app.add_option_function<std::string>(
        name,
        [&flags, key](const std::string& v) {
          if (v == "inf") {
            flags[key] = "inf";
            return;
          }
          try {
            std::size_t used = 0;
            const double x = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            flags[key] = x;
          } catch (const std::exception&) {
            throw CLI::ValidationError(key, "not a number: " + v);
          }
        },
        help);
  };
  auto text_flag = [&](const std::string& name, const std::string& key, const std::string& help) {
    app.add_option_function<std::string>(name, [&flags, key](const std::string& v) { flags[key] = v; }, help);
  };

  int_flag("--n", "n", "spatial dimension (2 or 3)");
  int_flag("--N", "N", "grid points per axis");
  real_flag("--nu", "nu", "viscosity");
  real_flag("--alpha", "alpha", "fractional order of the dissipation");
  real_flag("--s", "s", "regularity exponent");
  real_flag("--r", "r", "second exponent (r for the b-norm, or the L^r exponent)");
  real_flag("--t0", "t0", "start time");
  real_flag("--T", "T", "final time or run length");
  real_flag("--dt", "dt", "time step");
  int_flag("--seed", "seed", "random seed");
  int_flag("--samples", "samples", "ensemble size");
  text_flag("--constants", "constants", "constant-table path");
  text_flag("--out", "output", "output directory");
  text_flag("--profile", "profile", "initial data: orszag-tang | random | rough");
  text_flag("--input", "input", "checkpoint to start from (ledger)");
  real_flag("--T-search", "T_search", "upper limit of the window search");
  real_flag("--u-norm", "u_norm", "initial H^s norm of u");
  real_flag("--b-norm", "b_norm", "initial H^{s+1} norm of b");
  real_flag("--margin", "margin", "slope margin of rough data");
  real_flag("--min-window", "min_window", "shorter predicted windows count as empty");
  int_flag("--checkpoint-every", "checkpoint_every", "mhd-run checkpoint cadence in steps");
  real_flag("--C-nu", "C_nu", "override the fitted C_nu");
  real_flag("--C-0", "C_0", "override the fitted C_0");
  std::vector<double> eps_list, nu_list;
  app.add_option("--eps", eps_list, "epsilon list for stokes-logscan")->delimiter(',');
  app.add_option("--nu-list", nu_list, "extra viscosities for the stokes slope scaling")->delimiter(',');
  bool no_resolution_check = false;
  app.add_flag("--no-resolution-check", no_resolution_check, "skip the N/2 rerun of propagation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::kUsage);
  }

  try {
    if (positional.size() == 2 && positional[0] != "run") {
      std::cerr << "usage: lpmhd [run] <experiment> [options]\n";
      return static_cast<int>(ExitCode::kUsage);
    }
    Json doc = config_path.empty() ? Json::object() : load_json(config_path);
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    const std::string name = positional.back();
    if (doc.contains("experiment") && doc["experiment"] != name) {
      throw ConfigError("config names experiment '" + doc["experiment"].get<std::string>() + "' but '" + name +
                        "' was requested");
    }
    doc["experiment"] = name;
    for (const auto& [k, v] : flags.items()) doc[k] = v;
    if (!eps_list.empty()) doc["eps_list"] = eps_list;
    if (!nu_list.empty()) doc["nu_list"] = nu_list;
    if (no_resolution_check) doc["resolution_check"] = false;

    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      std::cerr << "unknown experiment '" << name << "'\nexperiments:\n" << list_experiments();
      return static_cast<int>(ExitCode::kUsage);
    }
    thread_count();  // validates LPMHD_THREADS before any work
    const ExperimentConfig cfg = ExperimentConfig::from_json(doc);
    const ExperimentOutcome o = run_experiment(cfg);
    std::cout << o.report.dump(2) << "\n";
    if (o.code == ExitCode::kEmptyWindow) std::cerr << "empty window: " << o.report["window"]["reason"] << "\n";
    return static_cast<int>(o.code);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(exit_code_for(e));
  }
}
