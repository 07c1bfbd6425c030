#include "lpmhd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "lpmhd/energy_ledger.hpp"
#include "lpmhd/error.hpp"
#include "lpmhd/littlewood_paley.hpp"
#include "lpmhd/mhd.hpp"
#include "lpmhd/operators.hpp"
#include "lpmhd/paraproduct.hpp"
#include "lpmhd/random_fields.hpp"
#include "lpmhd/stokes.hpp"

namespace lpmhd {

namespace fs = std::filesystem;

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"lp-verify",  "bernstein", "commutator", "bony",
                                                  "stokes-logscan", "heat-sum", "mhd-run",  "ledger",
                                                  "propagation",    "fit-constants"};
  return names;
}

// --- configuration -------------------------------------------------------------

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double number_from(const Json& j, const std::string& key) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    throw ConfigError("config field '" + key + "': expected a number, got \"" + s + "\"");
  }
  if (!j.is_number()) throw ConfigError("config field '" + key + "': expected a number");
  return j.get<double>();
}

Json number_to(double x) { return std::isinf(x) ? Json(x > 0 ? "inf" : "-inf") : Json(x); }

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  static const std::set<std::string> known = {
      "experiment", "n",        "N",      "nu",      "alpha",      "s",          "r",
      "t0",         "T",        "dt",     "eps_list", "nu_list",   "seed",       "samples",
      "constants",  "output",   "profile", "input",   "T_search",   "u_norm",     "b_norm",
      "margin",     "min_window", "resolution_check", "checkpoint_every", "C_nu", "C_0"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw ConfigError("unknown config field '" + key + "'");
  }
  try {
    auto num = [&](const char* key, double& out) {
      if (doc.contains(key)) out = number_from(doc[key], key);
    };
    auto opt = [&](const char* key, std::optional<double>& out) {
      if (doc.contains(key)) out = number_from(doc[key], key);
    };
    auto list = [&](const char* key, std::vector<double>& out) {
      if (!doc.contains(key)) return;
      if (!doc[key].is_array()) throw ConfigError(std::string("config field '") + key + "' must be an array");
      out.clear();
      for (const auto& v : doc[key]) out.push_back(number_from(v, key));
    };
    c.experiment = doc.value("experiment", "");
    c.n = doc.value("n", c.n);
    if (doc.contains("N")) c.N = doc["N"].get<int>();
    opt("nu", c.nu);
    num("alpha", c.alpha);
    opt("s", c.s);
    opt("r", c.r);
    num("t0", c.t0);
    opt("T", c.T);
    opt("dt", c.dt);
    list("eps_list", c.eps_list);
    list("nu_list", c.nu_list);
    c.seed = doc.value("seed", c.seed);
    if (doc.contains("samples")) c.samples = doc["samples"].get<int>();
    c.constants = doc.value("constants", c.constants);
    c.output = doc.value("output", c.output);
    c.profile = doc.value("profile", c.profile);
    c.input = doc.value("input", c.input);
    num("T_search", c.T_search);
    num("u_norm", c.u_norm);
    num("b_norm", c.b_norm);
    num("margin", c.margin);
    num("min_window", c.min_window);
    c.resolution_check = doc.value("resolution_check", c.resolution_check);
    c.checkpoint_every = doc.value("checkpoint_every", c.checkpoint_every);
    opt("C_nu", c.C_nu);
    opt("C_0", c.C_0);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

Json ExperimentConfig::to_json() const {
  Json j;
  j["experiment"] = experiment;
  j["n"] = n;
  if (N) j["N"] = *N;
  if (nu) j["nu"] = *nu;
  j["alpha"] = alpha;
  if (s) j["s"] = *s;
  if (r) j["r"] = number_to(*r);
  j["t0"] = t0;
  if (T) j["T"] = *T;
  if (dt) j["dt"] = *dt;
  if (!eps_list.empty()) j["eps_list"] = eps_list;
  if (!nu_list.empty()) j["nu_list"] = nu_list;
  j["seed"] = seed;
  if (samples) j["samples"] = *samples;
  if (!constants.empty()) j["constants"] = constants;
  j["output"] = output;
  if (!profile.empty()) j["profile"] = profile;
  if (!input.empty()) j["input"] = input;
  j["T_search"] = T_search;
  j["u_norm"] = u_norm;
  j["b_norm"] = b_norm;
  j["margin"] = margin;
  j["min_window"] = min_window;
  j["resolution_check"] = resolution_check;
  j["checkpoint_every"] = checkpoint_every;
  if (C_nu) j["C_nu"] = *C_nu;
  if (C_0) j["C_0"] = *C_0;
  return j;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), experiment) == names.end()) {
    fail("unknown experiment '" + experiment + "'");
  }
  if (n != 2 && n != 3) fail("n must be 2 or 3");
  if (N) {
    if (*N < 16 || *N > 2048 || (*N & (*N - 1)) != 0) fail("N must be a power of two in [16, 2048]");
    if (n == 3 && *N > 64) fail("n = 3 runs are limited to N <= 64");
  }
  auto positive = [&](const std::optional<double>& v, const char* name) {
    if (v && !(*v > 0.0 && std::isfinite(*v))) fail(std::string(name) + " must be positive and finite");
  };
  positive(nu, "nu");
  positive(T, "T");
  positive(dt, "dt");
  if (C_nu && *C_nu < 0.0) fail("C_nu must be nonnegative");
  if (C_0 && *C_0 < 0.0) fail("C_0 must be nonnegative");
  if (!(alpha > 0.0)) fail("alpha must be positive");
  if (s && !std::isfinite(*s)) fail("s must be finite");
  if (r && std::isnan(*r)) fail("r must be a number");
  if (!(t0 > 0.0)) fail("t0 must be positive");
  for (double e : eps_list) {
    if (!(e > 0.0)) fail("eps_list entries must be positive");
  }
  for (double v : nu_list) {
    if (!(v > 0.0)) fail("nu_list entries must be positive");
  }
  if (samples && *samples < 1) fail("samples must be at least 1");
  if (!(T_search > t0)) fail("T_search must exceed t0");
  if (!(u_norm >= 0.0) || !(b_norm >= 0.0)) fail("u_norm and b_norm must be nonnegative");
  if (!(margin > 0.0)) fail("margin must be positive");
  if (!(min_window >= 0.0)) fail("min_window must be nonnegative");
  if (checkpoint_every < 0) fail("checkpoint_every must be nonnegative");
  if (!profile.empty() && profile != "orszag-tang" && profile != "random" && profile != "rough") {
    fail("profile must be orszag-tang, random or rough");
  }
  if (output.empty()) fail("output directory must be named");
}

ExitCode exit_code_for(const std::exception& e) {
  if (dynamic_cast<const BlowUpError*>(&e)) return ExitCode::kBlowUp;
  if (dynamic_cast<const NumericalError*>(&e)) return ExitCode::kNumerical;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParameterError*>(&e) ||
      dynamic_cast<const GridMismatchError*>(&e) || dynamic_cast<const SymmetryError*>(&e) ||
      dynamic_cast<const FormatError*>(&e)) {
    return ExitCode::kConfig;
  }
  return ExitCode::kUsage;
}

// --- experiment bodies -------------------------------------------------------------

namespace {

class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void csv(const std::string& name, const CsvWriter& w) {
    w.save(dir_ / name);
    files_.push_back(name);
  }
  void json(const std::string& name, const Json& doc) {
    save_json(dir_ / name, doc);
    files_.push_back(name);
  }
  void checkpoint(const std::string& name, const MhdState& state) {
    save_checkpoint(dir_ / name, state);
    files_.push_back(name);
  }
  fs::path path(const std::string& name) const { return dir_ / name; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

int grid_points(const ExperimentConfig& cfg, int fallback) { return cfg.N.value_or(fallback); }
int sample_count(const ExperimentConfig& cfg, int fallback) { return cfg.samples.value_or(fallback); }

double partition_defect(const LittlewoodPaley& lp) {
  double worst = 0.0;
  for (std::size_t i = 0; i < lp.grid().size(); ++i) {
    if (lp.grid().nyquist(i)) continue;  // zero in every field by construction
    double sum = 0.0;
    for (int q = -1; q <= lp.q_max(); ++q) sum += lp.symbol(q, i);
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

double relative_l2(const SpectralField& a, const SpectralField& b) {
  const double ref = l2_norm(b);
  const double diff = l2_norm(a - b);
  return ref > 0.0 ? diff / ref : diff;
}

std::string grid_label(int n, int N) { return "n=" + std::to_string(n) + ",N=" + std::to_string(N); }

double relative_change(double a, double b) { return b != 0.0 ? std::abs(a - b) / std::abs(b) : std::abs(a - b); }

ExperimentOutcome lp_verify(const ExperimentConfig& cfg, Artifacts& out) {
  const int N = grid_points(cfg, 64);
  const int samples = sample_count(cfg, 50);
  const Grid g(cfg.n, N);
  const LittlewoodPaley lp(g, DyadicCutoff::build());

  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> slope(0.5, 3.0);
  RandomFieldOptions opts;
  opts.components = cfg.n;
  opts.dealiased = false;
  CsvWriter recon({"sample", "slope", "relative_error"});
  double worst = 0.0;
  for (int m = 0; m < samples; ++m) {
    const double sigma = slope(rng);
    const SpectralField u = random_field(g, power_law_envelope(sigma), rng, opts);
    const double err = relative_l2(lp.decompose(u).reconstruct(), u);
    worst = std::max(worst, err);
    recon.row({static_cast<double>(m), sigma, err});
  }
  out.csv("lp_reconstruction.csv", recon);

  const EquivalenceScan eq = norm_equivalence_scan(lp, samples, {0.0, 0.5, 1.0, 2.0}, cfg.seed + 1);
  CsvWriter eqcsv({"s", "min_ratio", "max_ratio"});
  for (std::size_t i = 0; i < eq.s_values.size(); ++i) eqcsv.row({eq.s_values[i], eq.min_by_s[i], eq.max_by_s[i]});
  out.csv("norm_equivalence.csv", eqcsv);

  ExperimentOutcome o;
  o.report = {{"experiment", "lp-verify"},
              {"grid", grid_label(cfg.n, N)},
              {"q_max", lp.q_max()},
              {"samples", samples},
              {"partition_defect", partition_defect(lp)},
              {"max_reconstruction_error", worst},
              {"c1", eq.c1},
              {"c2", eq.c2},
              {"c2_over_c1", eq.c1 > 0.0 ? eq.c2 / eq.c1 : kInf}};
  return o;
}

ExperimentOutcome bernstein(const ExperimentConfig& cfg, Artifacts& out) {
  const int N = grid_points(cfg, 128);
  const int samples = sample_count(cfg, 100);
  const double r = cfg.r.value_or(kInf);
  const double s = cfg.s.value_or(2.0);
  const Grid g(cfg.n, N);
  const LittlewoodPaley lp(g, DyadicCutoff::build());
  const BernsteinScan scan = bernstein_scan(lp, samples, r, s, cfg.seed);
  CsvWriter csv({"q", "max_ratio"});
  for (std::size_t i = 0; i < scan.shells.size(); ++i) csv.row({static_cast<double>(scan.shells[i]), scan.max_ratio[i]});
  out.csv("bernstein.csv", csv);
  ExperimentOutcome o;
  o.report = {{"experiment", "bernstein"}, {"grid", grid_label(cfg.n, N)}, {"r", number_to(r)},
              {"s", s},                    {"samples_per_shell", samples}, {"shells", scan.shells},
              {"max_ratio", scan.max_ratio}, {"C_B", scan.constant},     {"spread", scan.spread}};
  return o;
}

ExperimentOutcome commutator_exp(const ExperimentConfig& cfg, Artifacts& out) {
  const int N = grid_points(cfg, 128);
  const int samples = sample_count(cfg, 120);
  const double r = cfg.r.value_or(2.0);
  const Grid g(cfg.n, N);
  const LittlewoodPaley lp(g, DyadicCutoff::build());
  const CommutatorScan scan = commutator_scan(lp, samples, r, cfg.seed);
  CsvWriter csv({"q", "max_ratio"});
  for (std::size_t i = 0; i < scan.shells.size(); ++i) csv.row({static_cast<double>(scan.shells[i]), scan.max_ratio[i]});
  out.csv("commutator.csv", csv);

  // Consistency of the two evaluation orders on random pairs.
  Rng rng(cfg.seed + 17);
  std::uniform_int_distribution<int> shell(1, lp.q_max());
  std::uniform_int_distribution<int> offset(-2, 2);
  double consistency = 0.0;
  for (int m = 0; m < 20; ++m) {
    const int q = shell(rng);
    const int p = std::clamp(q + offset(rng), -1, lp.q_max());
    const SolenoidalField u = random_solenoidal(g, power_law_envelope(2.0), rng);
    RandomFieldOptions opts;
    opts.components = cfg.n;
    const SpectralField v = random_field(g, power_law_envelope(2.0), rng, opts);
    const SpectralField low = lp.low_pass(u.field(), p - 2);
    const SpectralField vp = lp.block(v, p);
    SpectralField lhs = commutator(lp, q, p, u, v);
    lhs += transport(low, lp.block(vp, q));
    consistency = std::max(consistency, relative_l2(lhs, lp.block(transport(low, vp), q)));
  }

  ExperimentOutcome o;
  o.report = {{"experiment", "commutator"}, {"grid", grid_label(cfg.n, N)},
              {"r", r},                     {"samples_per_shell", samples},
              {"shells", scan.shells},      {"max_ratio", scan.max_ratio},
              {"C_comm", scan.constant},    {"spread", scan.spread},
              {"consistency_defect", consistency}};
  return o;
}

ExperimentOutcome bony(const ExperimentConfig& cfg, Artifacts& out) {
  const int N = grid_points(cfg, 64);
  const int samples = sample_count(cfg, 50);
  const Grid g(cfg.n, N);
  const LittlewoodPaley lp(g, DyadicCutoff::build());
  Rng rng(cfg.seed);
  // Δ_{−1} keeps only k = 0 on the integer lattice, where (u·∇)v has zero
  // mean; that shell is compared against ‖(u·∇)v‖₂ instead.
  std::uniform_int_distribution<int> shell(0, lp.q_max());
  std::uniform_real_distribution<double> slope(1.0, 3.0);
  RandomFieldOptions opts;
  opts.components = cfg.n;
  CsvWriter csv({"trial", "q", "relative_error", "mean_shell_error"});
  double worst = 0.0, worst_mean = 0.0;
  for (int m = 0; m < samples; ++m) {
    const SolenoidalField u = random_solenoidal(g, power_law_envelope(slope(rng)), rng);
    const SpectralField v = random_field(g, power_law_envelope(slope(rng)), rng, opts);
    const int q = shell(rng);
    const SpectralField full = advect(u, v);
    const double err = relative_l2(bony_split(lp, u, v, q).sum(), lp.block(full, q));
    const double mean_err = l2_norm(bony_split(lp, u, v, -1).sum() - lp.block(full, -1)) / l2_norm(full);
    worst = std::max(worst, err);
    worst_mean = std::max(worst_mean, mean_err);
    csv.row({static_cast<double>(m), static_cast<double>(q), err, mean_err});
  }
  out.csv("bony.csv", csv);
  ExperimentOutcome o;
  o.report = {{"experiment", "bony"},        {"grid", grid_label(cfg.n, N)},
              {"samples", samples},          {"max_relative_error", worst},
              {"max_mean_shell_error", worst_mean}};
  return o;
}

ExperimentOutcome stokes_logscan(const ExperimentConfig& cfg, Artifacts& out) {
  const int N = grid_points(cfg, 512);
  const Grid g(cfg.n, N);
  StokesConfig sc;
  sc.nu = cfg.nu.value_or(1.0);
  sc.alpha = cfg.alpha;
  sc.s = cfg.s.value_or(1.2);
  sc.T = cfg.T.value_or(1.0);
  if (!cfg.eps_list.empty()) sc.eps_list = cfg.eps_list;
  sc.validate();

  CsvWriter csv({"profile", "nu", "eps", "J", "fitted", "quadrature_error"});
  auto emit = [&](const std::string& profile, double nu, const LogScanReport& rep) {
    for (const auto& row : rep.rows) {
      csv.row(std::vector<std::string>{profile, format_double(nu), format_double(row.eps), format_double(row.J),
                                       format_double(row.fitted), format_double(row.quadrature_error)});
    }
  };
  const RoughDataSpec spec{sc.s, cfg.margin, cfg.seed};
  const LogScanReport rough = log_scan(spec, g, sc);
  emit("rough", sc.nu, rough);
  const LogScanReport smooth = log_scan(smooth_data(sc.s, cfg.seed, g), sc);
  emit("smooth", sc.nu, smooth);
  const double J_first = smooth.rows.front().J;

  Json scaling = Json::array();
  double spread = 0.0;
  if (!cfg.nu_list.empty()) {
    std::vector<double> products;
    for (double nu : cfg.nu_list) {
      StokesConfig c = sc;
      c.nu = nu;
      const LogScanReport rep = log_scan(spec, g, c);
      emit("rough", nu, rep);
      products.push_back(rep.b * nu);
      scaling.push_back({{"nu", nu}, {"b", rep.b}, {"b_times_nu", rep.b * nu}, {"r2", rep.r2}});
    }
    const double mean = std::accumulate(products.begin(), products.end(), 0.0) / products.size();
    for (double p : products) spread = std::max(spread, std::abs(p - mean) / mean);
  }
  out.csv("logscan.csv", csv);

  ExperimentOutcome o;
  o.report = {{"experiment", "stokes-logscan"},
              {"grid", grid_label(cfg.n, N)},
              {"nu", sc.nu},
              {"alpha", sc.alpha},
              {"s", sc.s},
              {"T", sc.T},
              {"rough", {{"a", rough.a}, {"b", rough.b}, {"r2", rough.r2}, {"data_hs_norm", rough.data_hs_norm}}},
              {"smooth",
               {{"a", smooth.a}, {"b", smooth.b}, {"r2", smooth.r2}, {"b_over_J_first", smooth.b / J_first}}},
              {"C_sto", rough.b * sc.nu / rough.data_hs_norm}};
  if (!cfg.nu_list.empty()) {
    o.report["nu_scaling"] = scaling;
    o.report["nu_scaling_spread"] = spread;
  }
  return o;
}

ExperimentOutcome heat_sum_exp(const ExperimentConfig& cfg, Artifacts& out) {
  const double nu = cfg.nu.value_or(1.0);
  const int points = sample_count(cfg, 61);
  if (points < 2) throw ConfigError("heat-sum needs at least two t samples");
  const double t_hi = cfg.T.value_or(1.0);
  const HeatSumReport coarse = heat_sum_check(nu, cfg.alpha, log_space(1e-6, t_hi, points));
  const HeatSumReport fine = heat_sum_check(nu, cfg.alpha, log_space(1e-6, t_hi, 2 * points - 1));
  CsvWriter csv({"t", "series", "ratio", "terms"});
  for (const auto& row : fine.rows) csv.row({row.t, row.series, row.ratio, static_cast<double>(row.terms)});
  out.csv("heat_sum.csv", csv);
  ExperimentOutcome o;
  o.report = {{"experiment", "heat-sum"},
              {"nu", nu},
              {"alpha", cfg.alpha},
              {"t_range", {1e-6, t_hi}},
              {"sup_ratio", fine.sup_ratio},
              {"sup_ratio_coarse", coarse.sup_ratio},
              {"grid_change", relative_change(coarse.sup_ratio, fine.sup_ratio)}};
  return o;
}

MhdState initial_state(const ExperimentConfig& cfg, const Grid& g, const std::string& profile) {
  if (profile == "orszag-tang") return orszag_tang(g);
  if (profile == "rough") {
    return rough_state(g, cfg.s.value_or(1.2), cfg.u_norm, cfg.b_norm, cfg.seed, cfg.margin, cfg.t0);
  }
  Rng rng(cfg.seed);
  auto envelope = [](double k) { return std::exp(-0.125 * k * k); };
  SpectralField u = random_solenoidal(g, envelope, rng).field();
  SpectralField b = random_solenoidal(g, envelope, rng).field();
  if (const double e = l2_norm(u); e > 0.0) u *= cfg.u_norm / e;
  if (const double e = l2_norm(b); e > 0.0) b *= cfg.b_norm / e;
  return {SolenoidalField::trusted(std::move(u)), SolenoidalField::trusted(std::move(b)), 0.0};
}

std::string checkpoint_name(const char* prefix, long index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%06ld.lpmh", prefix, index);
  return buf;
}

ExperimentOutcome mhd_run(const ExperimentConfig& cfg, Artifacts& out) {
  const int N = grid_points(cfg, 128);
  const Grid g(cfg.n, N);
  const std::string profile = cfg.profile.empty() ? "orszag-tang" : cfg.profile;
  const MhdState init = initial_state(cfg, g, profile);
  SolverParams p;
  p.nu = cfg.nu.value_or(0.05);
  p.dt = cfg.dt.value_or(1e-3);
  p.s = cfg.s.value_or(1.0);
  const double t_end = init.t + cfg.T.value_or(1.0);

  StepObserver observer;
  if (cfg.checkpoint_every > 0) {
    observer = [&](const MhdState& st, long k) {
      if (k % cfg.checkpoint_every == 0) out.checkpoint(checkpoint_name("state", k), st);
    };
  }
  const RunResult res = run(init, p, t_end, observer);
  CsvWriter csv({"t", "energy_u", "energy_b", "dissipation", "A", "div_u", "div_b", "tail_fraction"});
  for (const auto& d : res.series) {
    csv.row({d.t, d.energy_u, d.energy_b, d.dissipation, d.A, d.div_u, d.div_b, d.tail_fraction});
  }
  out.csv("diagnostics.csv", csv);
  const EnergyReport er = energy_report(res.series, p.nu);

  ExperimentOutcome o;
  o.report = {{"experiment", "mhd-run"},
              {"grid", grid_label(cfg.n, N)},
              {"profile", profile},
              {"nu", p.nu},
              {"dt", p.dt},
              {"t_end", t_end},
              {"steps", res.steps},
              {"blew_up", res.blew_up},
              {"initial_energy", er.initial_energy},
              {"max_D", er.max_D},
              {"max_abs_D", er.max_abs_D},
              {"max_tail_fraction", er.max_tail_fraction},
              {"spurious_growth", er.spurious},
              {"under_resolved", er.under_resolved}};
  if (res.blew_up) {
    o.report["failure_time"] = res.failure_time;
    o.report["failure"] = res.failure;
    o.code = ExitCode::kBlowUp;
  }
  return o;
}

Json flux_json(const FluxTerms& f) {
  return {{"s", f.s},       {"r", f.r},       {"I1", f.I1},     {"I2", f.I2},     {"I3", f.I3},
          {"I4", f.I4},     {"I11", f.I11},   {"I12", f.I12},   {"I13", f.I13},   {"I111", f.I111},
          {"I112", f.I112}, {"I113", f.I113}, {"I21", f.I21},   {"I22", f.I22},   {"I23", f.I23},
          {"I31", f.I31},   {"I32", f.I32},   {"I33", f.I33},   {"I311", f.I311}, {"I312", f.I312},
          {"I313", f.I313}, {"I41", f.I41},   {"I42", f.I42},   {"I43", f.I43}};
}

double split_defect(double total, std::initializer_list<double> parts) {
  double sum = 0.0, scale = std::abs(total);
  for (double p : parts) {
    sum += p;
    scale = std::max(scale, std::abs(p));
  }
  return scale > 0.0 ? std::abs(sum - total) / scale : 0.0;
}

ExperimentOutcome ledger(const ExperimentConfig& cfg, Artifacts& out) {
  MhdState start = [&] {
    if (!cfg.input.empty()) return load_state(cfg.input);
    const Grid g(cfg.n, grid_points(cfg, 64));
    return initial_state(cfg, g, cfg.profile.empty() ? "rough" : cfg.profile);
  }();
  const Grid& g = start.grid();
  const LittlewoodPaley lp(g, DyadicCutoff::build());
  const double s = cfg.s.value_or(1.2);
  const double r = cfg.r.value_or(s + 1.0);
  const double nu = cfg.nu.value_or(0.05);
  const FluxTerms f = flux_terms(start, s, r, lp);

  SolverParams p;
  p.nu = nu;
  p.s = s;
  const double h0 = cfg.dt.value_or(1e-3);
  CsvWriter csv({"h", "du_dt_fd", "du_dt_flux", "du_dt_flux_block", "residual_u", "db_dt_fd", "db_dt_flux",
                 "residual_b"});
  std::vector<LedgerIdentity> rows;
  for (int level = 0; level < 3; ++level) {
    const double h = h0 / std::ldexp(1.0, level);
    p.dt = h / 4.0;
    MhdState cur = start;
    std::vector<std::string> names;
    for (int k = 0; k < 3; ++k) {
      if (k > 0) {
        for (int j = 0; j < 4; ++j) cur = step(cur, p);
      }
      names.push_back("triple_" + std::to_string(level) + "_" + std::to_string(k) + ".lpmh");
      out.checkpoint(names.back(), cur);
    }
    const MhdState a = load_state(out.path(names[0]));
    const MhdState b = load_state(out.path(names[1]));
    const MhdState c = load_state(out.path(names[2]));
    const LedgerIdentity li = ledger_identity(a, b, c, nu, s, r, lp);
    rows.push_back(li);
    csv.row({li.h, li.du_dt_fd, li.du_dt_flux, li.du_dt_flux_block, li.residual_u, li.db_dt_fd, li.db_dt_flux,
             li.residual_b});
  }
  out.csv("ledger.csv", csv);
  out.json("flux_terms.json", flux_json(f));

  auto order = [](double coarse, double fine) { return fine > 0.0 ? std::log2(coarse / fine) : kInf; };
  const double scale_u = std::max({std::abs(f.I11), std::abs(f.I111), std::abs(f.I113)});
  const double scale_b = std::max({std::abs(f.I31), std::abs(f.I311), std::abs(f.I313)});
  ExperimentOutcome o;
  o.report = {{"experiment", "ledger"},
              {"grid", grid_label(g.dimension(), g.points())},
              {"s", s},
              {"r", r},
              {"nu", nu},
              {"I1_split_defect", split_defect(f.I1, {f.I11, f.I12, f.I13})},
              {"I11_split_defect", split_defect(f.I11, {f.I111, f.I112, f.I113})},
              {"I2_split_defect", split_defect(f.I2, {f.I21, f.I22, f.I23})},
              {"I3_split_defect", split_defect(f.I3, {f.I31, f.I32, f.I33})},
              {"I31_split_defect", split_defect(f.I31, {f.I311, f.I312, f.I313})},
              {"I4_split_defect", split_defect(f.I4, {f.I41, f.I42, f.I43})},
              {"I112_relative", scale_u > 0.0 ? std::abs(f.I112) / scale_u : 0.0},
              {"I312_relative", scale_b > 0.0 ? std::abs(f.I312) / scale_b : 0.0},
              {"residual_u", {rows[0].residual_u, rows[1].residual_u, rows[2].residual_u}},
              {"residual_b", {rows[0].residual_b, rows[1].residual_b, rows[2].residual_b}},
              {"order_u", {order(rows[0].residual_u, rows[1].residual_u), order(rows[1].residual_u, rows[2].residual_u)}},
              {"order_b", {order(rows[0].residual_b, rows[1].residual_b), order(rows[1].residual_b, rows[2].residual_b)}}};
  return o;
}

std::optional<ConstantTable> load_table(const ExperimentConfig& cfg) {
  if (cfg.constants.empty()) return std::nullopt;
  if (!fs::exists(cfg.constants)) return std::nullopt;
  return ConstantTable::load(cfg.constants);
}

Json window_json(const Window& w) {
  return {{"empty", w.empty}, {"T", w.T}, {"F", w.F}, {"expF", w.expF}, {"growth", w.growth},
          {"binding", w.binding}, {"reason", w.reason},
          {"expF_below_2", w.expF < 2.0}, {"growth_below_1", w.growth < 1.0}};
}

ExperimentOutcome propagation(const ExperimentConfig& cfg, Artifacts& out) {
  const auto table = load_table(cfg);
  if (!cfg.constants.empty() && !table) throw ConfigError("constant table not found: " + cfg.constants);
  auto constant = [&](const std::optional<double>& override_value, const char* name) {
    if (override_value) return *override_value;
    if (!table) throw ConfigError(std::string("propagation needs ") + name + " (constant table or override)");
    return table->value(name);
  };
  const double C_nu = constant(cfg.C_nu, "C_nu");
  const double C_0 = constant(cfg.C_0, "C_0");

  PropagationConfig pc;
  pc.n = cfg.n;
  pc.N = grid_points(cfg, 256);
  pc.s = cfg.s.value_or(1.2);
  pc.nu = cfg.nu.value_or(0.05);
  pc.t0 = cfg.t0;
  pc.T_search = cfg.T_search;
  pc.dt = cfg.dt.value_or(1e-3);
  pc.u_norm = cfg.u_norm;
  pc.b_norm = cfg.b_norm;
  pc.margin = cfg.margin;
  pc.seed = cfg.seed;
  pc.min_window = cfg.min_window;
  pc.resolution_check = cfg.resolution_check;
  const PropagationReport rep = propagation_experiment(pc, C_nu, C_0);

  CsvWriter csv({"t", "A", "I1", "I2", "I3", "I4", "energy_residual"});
  for (const auto& row : rep.trace) csv.row({row.t, row.A, row.I1, row.I2, row.I3, row.I4, row.energy_residual});
  out.csv("trace.csv", csv);

  const auto& k = rep.constants;
  ExperimentOutcome o;
  o.report = {{"experiment", "propagation"},
              {"grid", grid_label(pc.n, pc.N)},
              {"verdict", rep.verdict},
              {"constants",
               {{"A0", k.A0}, {"M0", k.M0}, {"M1", k.M1}, {"beta", k.beta}, {"theta", k.theta},
                {"C_nu", k.C_nu}, {"C_0", k.C_0}, {"gamma", {k.gamma1, k.gamma2, k.gamma3}}, {"t0", k.t0}}},
              {"u0_Hs", rep.u0_Hs},
              {"window", window_json(rep.window)},
              {"T_predicted", rep.window.T},
              {"T_achieved", rep.T_achieved},
              {"max_A_ratio", rep.max_A_ratio},
              {"blew_up", rep.blew_up},
              {"dissipation_integral", rep.dissipation_integral},
              {"dissipation_bound", rep.dissipation_bound},
              {"l1_integral", rep.l1_integral},
              {"l1_bound", rep.l1_bound},
              {"resolution",
               {{"checked", rep.coarse_max_A_ratio.has_value()},
                {"coarse_max_A_ratio", rep.coarse_max_A_ratio ? Json(*rep.coarse_max_A_ratio) : Json(nullptr)},
                {"relative_change", rep.resolution_change},
                {"converged", rep.converged}}}};
  if (rep.blew_up) o.report["failure_time"] = rep.failure_time;
  out.json("propagation.json", o.report);
  if (rep.verdict == "EMPTY-WINDOW") o.code = ExitCode::kEmptyWindow;
  else if (rep.blew_up) o.code = ExitCode::kBlowUp;
  return o;
}

ExperimentOutcome fit_constants(const ExperimentConfig& cfg, Artifacts& out) {
  const int samples = sample_count(cfg, 50);
  if (samples < 50) throw ConfigError("fit-constants refuses ensembles smaller than 50 samples");
  const int N = grid_points(cfg, 128);
  const double s = cfg.s.value_or(1.2);
  const double nu = cfg.nu.value_or(0.05);
  ConstantTable table = load_table(cfg).value_or(ConstantTable{});

  struct Measured {
    std::map<std::string, double> values;
  };
  auto measure = [&](int points) {
    const Grid g(cfg.n, points);
    const LittlewoodPaley lp(g, DyadicCutoff::build());
    Measured m;
    const EquivalenceScan eq = norm_equivalence_scan(lp, samples, {0.0, 0.5, 1.0, 2.0}, cfg.seed);
    m.values["c1"] = eq.c1;
    m.values["c2"] = eq.c2;
    m.values["C_B"] = bernstein_scan(lp, samples, kInf, 2.0, cfg.seed).constant;
    m.values["C_comm"] = commutator_scan(lp, samples, 2.0, cfg.seed).constant;
    const InterpolationReport ir = interpolation_checks(g, samples, s, cfg.seed);
    m.values["R_bb"] = ir.R_bb;
    m.values["R_uu"] = ir.R_uu;
    StokesConfig sc;
    sc.s = s;
    const LogScanReport ls = log_scan(RoughDataSpec{s, cfg.margin, cfg.seed}, g, sc);
    m.values["C_sto"] = ls.b * sc.nu / ls.data_hs_norm;
    const CalibrationResult cr =
        calibrate_constants(calibration_ensemble(g, s, samples, cfg.seed, cfg.t0), nu, s, lp, m.values["C_sto"],
                            ir.R_bb, ir.R_uu);
    m.values["C_nu"] = cr.C_nu;
    m.values["C_0"] = cr.C_0;
    m.values["C_L1"] = cr.needs.l1;
    return m;
  };
  const Measured base = measure(N);
  const Measured doubled = measure(2 * N);

  const std::map<std::string, std::pair<std::string, double>> meta = {
      {"c1", {"random fields, envelope (1+|k|)^-sigma, sigma in [0.5,3], s in {0,0.5,1,2}", 0.10}},
      {"c2", {"random fields, envelope (1+|k|)^-sigma, sigma in [0.5,3], s in {0,0.5,1,2}", 0.10}},
      {"C_B", {"shell-q fields with coherence sweep, (r,s)=(inf,2)", 0.10}},
      {"C_comm", {"one-mode u below 2^(p-2), v on phi_q transition rings, r=2, p in {q-1,q,q+1}", 0.15}},
      {"R_bb", {"random solenoidal fields, slopes s+1+n/2+[0.5,3]", 0.25}},
      {"R_uu", {"random solenoidal fields, slopes s+1+n/2+[0.5,3]", 0.25}},
      {"C_sto", {"rough data log-scan slope times nu over data H^s norm, nu=1", 0.20}},
      {"C_nu", {"calibration ensemble, 1.1x margin over the energy inequalities", 0.25}},
      {"C_0", {"calibration ensemble, 1.1x margin over the b-flux estimates", 0.25}},
      {"C_L1", {"C_sto/nu times max(1, R_bb, R_uu); diagnostic, not used by the window", 0.25}},
  };
  Json drift = Json::object();
  for (const auto& [name, info] : meta) {
    ConstantEntry e;
    e.name = name;
    e.value = base.values.at(name);
    e.ensemble = info.first;
    e.samples = samples;
    e.grid = grid_label(cfg.n, N);
    e.drift = relative_change(doubled.values.at(name), e.value);
    e.drift_tolerance = info.second;
    e.flagged = *e.drift > e.drift_tolerance;
    drift[name] = {{"value", e.value}, {"value_2N", doubled.values.at(name)}, {"drift", *e.drift},
                   {"flagged", e.flagged}};
    table.set(std::move(e));
  }

  // Heat-sum supremum: its "drift" is the change under halving the t-grid.
  {
    const HeatSumReport a = heat_sum_check(1.0, cfg.alpha, log_space(1e-6, 1.0, 61));
    const HeatSumReport b = heat_sum_check(1.0, cfg.alpha, log_space(1e-6, 1.0, 121));
    ConstantEntry e;
    e.name = "C_heat";
    e.value = b.sup_ratio;
    e.ensemble = "sup over t in [1e-6,1] of series * sqrt(nu t), nu=1, t-grid halving";
    e.samples = 121;
    e.grid = "t-grid";
    e.drift = relative_change(a.sup_ratio, b.sup_ratio);
    e.drift_tolerance = 0.05;
    e.flagged = *e.drift > e.drift_tolerance;
    drift["C_heat"] = {{"value", e.value}, {"value_coarse_t", a.sup_ratio}, {"drift", *e.drift}, {"flagged", e.flagged}};
    table.set(std::move(e));
  }

  out.json("constants.json", table.to_json());
  if (!cfg.constants.empty()) table.save(cfg.constants);
  ExperimentOutcome o;
  o.report = {{"experiment", "fit-constants"}, {"grid", grid_label(cfg.n, N)}, {"samples", samples}, {"constants", drift}};
  return o;
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  Artifacts out(cfg.output);
  using Body = std::function<ExperimentOutcome(const ExperimentConfig&, Artifacts&)>;
  static const std::map<std::string, Body> bodies = {
      {"lp-verify", lp_verify},     {"bernstein", bernstein},         {"commutator", commutator_exp},
      {"bony", bony},               {"stokes-logscan", stokes_logscan}, {"heat-sum", heat_sum_exp},
      {"mhd-run", mhd_run},         {"ledger", ledger},               {"propagation", propagation},
      {"fit-constants", fit_constants}};
  ExperimentOutcome o = bodies.at(cfg.experiment)(cfg, out);
  if (cfg.experiment != "propagation") out.json("report.json", o.report);
  o.files = out.files();
  write_manifest(cfg.output, cfg.to_json(), cfg.seed, o.files);
  return o;
}

}  // namespace lpmhd
