#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lpmhd/io.hpp"

namespace lpmhd {

enum class ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfig = 2,
  kNumerical = 3,
  kBlowUp = 4,
  kEmptyWindow = 5,
};

/// One experiment invocation. Unset optionals take the experiment's own
/// default (for instance ν = 1 for stokes-logscan, ν = 0.05 for mhd-run).
struct ExperimentConfig {
  std::string experiment;
  int n = 2;
  std::optional<int> N;
  std::optional<double> nu;
  double alpha = 1.0;
  std::optional<double> s;
  std::optional<double> r;
  double t0 = 1.0;
  std::optional<double> T;
  std::optional<double> dt;
  std::vector<double> eps_list;
  std::vector<double> nu_list;  // stokes-logscan: extra viscosities for the slope scaling
  std::uint64_t seed = 1;
  std::optional<int> samples;
  std::string constants;        // constant-table path
  std::string output = "out";
  std::string profile;          // mhd-run: orszag-tang | random | rough
  std::string input;            // ledger: optional checkpoint to start from
  double T_search = 2.0;
  double u_norm = 1.0;
  double b_norm = 1.0;
  double margin = 0.01;
  double min_window = 0.0;
  bool resolution_check = true;
  int checkpoint_every = 0;
  std::optional<double> C_nu;   // overrides of the table entries
  std::optional<double> C_0;

  static ExperimentConfig from_json(const Json& doc);
  Json to_json() const;
  /// Checks every field against the owning module's preconditions; throws
  /// ConfigError naming the violated constraint.
  void validate() const;
};

const std::vector<std::string>& experiment_names();

struct ExperimentOutcome {
  ExitCode code = ExitCode::kOk;
  Json report;
  std::vector<std::string> files;  // relative to the output directory
};

/// Runs the experiment, writes its CSV/JSON artifacts plus manifest.json into
/// cfg.output and returns the report. Library errors propagate; the CLI maps
/// them through exit_code_for.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

ExitCode exit_code_for(const std::exception& e);

}  // namespace lpmhd
