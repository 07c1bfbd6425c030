// Acceptance run: one PASS/FAIL line per criterion. Optional arguments select
// criteria by number ("acceptance 3 7").

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lpmhd/energy_ledger.hpp"
#include "lpmhd/io.hpp"
#include "lpmhd/littlewood_paley.hpp"
#include "lpmhd/mhd.hpp"
#include "lpmhd/operators.hpp"
#include "lpmhd/paraproduct.hpp"
#include "lpmhd/random_fields.hpp"
#include "lpmhd/stokes.hpp"
#include "oracles.hpp"

using namespace lpmhd;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct Detail {
  std::ostringstream os;
  template <class T>
  Detail& kv(const char* k, const T& v) {
    os << (os.tellp() > 0 ? ", " : "") << k << "=" << v;
    return *this;
  }
  Detail& num(const char* k, double v) { return kv(k, fmt("%.3g", v)); }
  std::string str() const { return os.str(); }
};

double spread_about_mean(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double worst = 0.0;
  for (double x : v) worst = std::max(worst, std::abs(x - mean) / mean);
  return worst;
}

// 1 -------------------------------------------------------------------------
Outcome lp_reconstruction() {
  double recon = 0.0, partition = 0.0;
  for (int N : {64, 256}) {
    const Grid g(2, N);
    const LittlewoodPaley lp(g, DyadicCutoff::build());
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.nyquist(i)) continue;
      double sum = 0.0;
      for (int q = -1; q <= lp.q_max(); ++q) sum += lp.symbol(q, i);
      partition = std::max(partition, std::abs(sum - 1.0));
    }
    Rng rng(100 + N);
    RandomFieldOptions opts;
    opts.components = 2;
    opts.zero_mean = false;
    opts.dealiased = false;
    for (int m = 0; m < 50; ++m) {
      const SpectralField u = random_field(g, power_law_envelope(0.5 + 0.05 * m), rng, opts);
      recon = std::max(recon, oracle::rel_diff(lp.decompose(u).reconstruct(), u));
    }
  }
  Detail d;
  d.num("max_reconstruction", recon).num("max_partition_defect", partition);
  return {recon <= 1e-12 && partition <= 1e-12, d.str()};
}

// 2 -------------------------------------------------------------------------
Outcome norm_equivalence() {
  const LittlewoodPaley lp(Grid(2, 128), DyadicCutoff::build());
  const EquivalenceScan scan = norm_equivalence_scan(lp, 200, {0.0, 0.5, 1.0, 2.0}, 7);
  Detail d;
  d.num("c1", scan.c1).num("c2", scan.c2).num("c2/c1", scan.c2 / scan.c1);
  return {scan.c1 > 0.0 && scan.c2 / scan.c1 <= 6.0, d.str()};
}

// 3 -------------------------------------------------------------------------
Outcome bernstein() {
  const LittlewoodPaley a(Grid(2, 128), DyadicCutoff::build());
  const LittlewoodPaley b(Grid(2, 256), DyadicCutoff::build());
  const BernsteinScan sa = bernstein_scan(a, 100, INFINITY, 2.0, 3);
  const BernsteinScan sb = bernstein_scan(b, 100, INFINITY, 2.0, 3);
  const double uniform = std::max(spread_about_mean(sa.max_ratio), spread_about_mean(sb.max_ratio));
  const double drift = std::abs(sb.constant - sa.constant) / sa.constant;
  Detail d;
  d.num("C_B(128)", sa.constant).num("C_B(256)", sb.constant).num("shell_deviation", uniform).num("N_drift", drift);
  return {uniform <= 0.10 && drift <= 0.10, d.str()};
}

// 4 -------------------------------------------------------------------------
Outcome bony() {
  const Grid g(2, 64);
  const LittlewoodPaley lp(g, DyadicCutoff::build());
  Rng rng(44);
  std::uniform_int_distribution<int> pick(-1, lp.q_max());
  std::uniform_real_distribution<double> slope(0.5, 3.0);
  RandomFieldOptions opts;
  opts.components = 2;
  double worst = 0.0;
  for (int m = 0; m < 50; ++m) {
    const SolenoidalField u = random_solenoidal(g, power_law_envelope(slope(rng)), rng);
    const SpectralField v = random_field(g, power_law_envelope(slope(rng)), rng, opts);
    const int q = pick(rng);
    const SpectralField full = advect(u, v);
    const SpectralField target = lp.block(full, q);
    const double err = oracle::l2(bony_split(lp, u, v, q).sum() - target);
    // Δ_{−1} is the mean projection, which vanishes for a divergence-form
    // product; measure that block against the whole product instead.
    const double scale = q < 0 ? oracle::l2(full) : oracle::l2(target);
    worst = std::max(worst, err / scale);
  }
  Detail d;
  d.num("max_relative_error", worst);
  return {worst <= 1e-10, d.str()};
}

// 5 -------------------------------------------------------------------------
Outcome commutator_law() {
  // Identity against the mode-pair convolution with reference cutoffs.
  const Grid small(2, 32);
  const LittlewoodPaley lps(small, DyadicCutoff::build());
  auto ref_block = [&](int q, const SpectralField& f) {
    SpectralField out = f;
    for (std::size_t i = 0; i < small.size(); ++i) {
      double m = 0.0;
      if (!small.nyquist(i)) m = q < 0 ? oracle::chi(small.kabs(i)) : oracle::phi(std::ldexp(small.kabs(i), -q));
      for (int c = 0; c < f.components(); ++c) out(c, i) *= m;
    }
    return out;
  };
  auto ref_low = [&](int Q, const SpectralField& f) {
    SpectralField out = f;
    for (std::size_t i = 0; i < small.size(); ++i) {
      const double m = (Q < -1 || small.nyquist(i)) ? 0.0 : oracle::chi(std::ldexp(small.kabs(i), -(Q + 1)));
      for (int c = 0; c < f.components(); ++c) out(c, i) *= m;
    }
    return out;
  };
  Rng rng(55);
  RandomFieldOptions opts;
  opts.components = 2;
  double identity = 0.0;
  for (int m = 0; m < 3; ++m) {
    const SolenoidalField u = random_solenoidal(small, power_law_envelope(1.0), rng);
    const SpectralField v = random_field(small, power_law_envelope(1.0), rng, opts);
    for (int q = -1; q <= lps.q_max(); ++q) {
      for (int p = std::max(-1, q - 2); p <= std::min(lps.q_max(), q + 2); ++p) {
        const SpectralField low = ref_low(p - 2, u.field());
        const SpectralField vp = ref_block(p, v);
        const SpectralField ref = ref_block(q, oracle::convolution_transport(low, vp)) -
                                  oracle::convolution_transport(low, ref_block(q, vp));
        const SpectralField got = commutator(lps, q, p, u, v);
        identity = std::max(identity, oracle::l2(got - ref) / std::max(oracle::l2(ref), oracle::l2(v)));
      }
    }
  }
  const CommutatorScan a = commutator_scan(LittlewoodPaley(Grid(2, 128), DyadicCutoff::build()), 120, 2.0, 9);
  const CommutatorScan b = commutator_scan(LittlewoodPaley(Grid(2, 256), DyadicCutoff::build()), 120, 2.0, 9);
  const double drift = std::abs(b.constant - a.constant) / a.constant;
  Detail d;
  d.num("identity_error", identity)
      .num("C_comm(128)", a.constant)
      .num("C_comm(256)", b.constant)
      .num("N_drift", drift)
      .num("shell_spread(256)", b.spread);
  return {identity <= 1e-11 && drift <= 0.15, d.str()};
}

// 6 -------------------------------------------------------------------------
Outcome cancellations() {
  const Grid g(2, 64);
  const LittlewoodPaley lp(g, DyadicCutoff::build());
  double worst = 0.0;
  for (int m = 0; m < 20; ++m) {
    const MhdState st = rough_state(g, 1.2, 0.5 + 0.1 * m, 0.5 + 0.1 * m, 600 + m, 0.01 + 0.15 * m);
    const FluxTerms f = flux_terms(st, 1.2, 2.2, lp);
    const double su = std::abs(f.I111) + std::abs(f.I113) + std::abs(f.I11);
    const double sb = std::abs(f.I311) + std::abs(f.I313) + std::abs(f.I31);
    worst = std::max({worst, std::abs(f.I112) / su, std::abs(f.I312) / sb});
  }
  Detail d;
  d.num("max_relative", worst);
  return {worst <= 1e-9, d.str()};
}

// 7 -------------------------------------------------------------------------
Outcome stokes_log_law() {
  const Grid g(2, 512);
  StokesConfig cfg;
  cfg.s = 1.2;
  cfg.nu = 1.0;
  cfg.alpha = 1.0;
  cfg.T = 1.0;
  cfg.eps_list = log_space(1e-4, 1e-1, 7);
  std::reverse(cfg.eps_list.begin(), cfg.eps_list.end());
  const RoughDataSpec spec{1.2, 0.01, 1};
  const LogScanReport rough = log_scan(spec, g, cfg);
  const LogScanReport smooth = log_scan(smooth_data(1.2, 1, g), cfg);
  const double smooth_share = std::abs(smooth.b) / smooth.rows.front().J;
  std::vector<double> scaled;
  for (double nu : {0.5, 1.0, 2.0}) {
    StokesConfig c = cfg;
    c.nu = nu;
    scaled.push_back(log_scan(spec, g, c).b * nu);
  }
  const double lo = *std::min_element(scaled.begin(), scaled.end());
  const double hi = *std::max_element(scaled.begin(), scaled.end());
  const double nu_spread = hi / lo - 1.0;
  Detail d;
  d.num("R2", rough.r2).num("b", rough.b).num("smooth_b/J", smooth_share).num("nu_scaling_spread", nu_spread);
  return {rough.r2 >= 0.99 && rough.b > 0.0 && smooth_share <= 0.05 && nu_spread <= 0.20, d.str()};
}

// 8 -------------------------------------------------------------------------
Outcome heat_sum_bound() {
  const HeatSumReport fine = heat_sum_check(1.0, 1.0, log_space(1e-6, 1.0, 121));
  const HeatSumReport coarse = heat_sum_check(1.0, 1.0, log_space(1e-6, 1.0, 61));
  const double change = std::abs(fine.sup_ratio - coarse.sup_ratio) / fine.sup_ratio;
  Detail d;
  d.num("sup_ratio", fine.sup_ratio).num("sup_ratio_half_grid", coarse.sup_ratio).num("change", change);
  return {std::isfinite(fine.sup_ratio) && change <= 0.05, d.str()};
}

// 9 -------------------------------------------------------------------------
Outcome energy_inequality() {
  const MhdState start = orszag_tang(Grid(2, 128));
  auto run_at = [&](double dt) {
    SolverParams p;
    p.nu = 0.05;
    p.dt = dt;
    const RunResult res = run(start, p, 1.0);
    if (res.blew_up) return EnergyReport{};
    return energy_report(res.series, p.nu);
  };
  const EnergyReport a = run_at(1e-3);
  const EnergyReport b = run_at(5e-4);
  const double ratio = a.max_abs_D / b.max_abs_D;
  Detail d;
  d.num("E0", a.initial_energy)
      .num("max|D|(dt)", a.max_abs_D)
      .num("max|D|(dt/2)", b.max_abs_D)
      .num("ratio", ratio)
      .num("tail_fraction", a.max_tail_fraction);
  const bool ok = a.initial_energy > 0.0 && a.max_abs_D <= 1e-6 * a.initial_energy && ratio >= 3.5;
  return {ok, d.str()};
}

// 10 ------------------------------------------------------------------------
Outcome scaling() {
  const Grid g(2, 64);
  const int K = g.dealias_cutoff() / 2;
  double worst = 0.0;
  for (int m = 0; m < 10; ++m) {
    Rng rng(1000 + m);
    RandomFieldOptions opts;
    opts.components = 2;
    auto band = [&](SpectralField f) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        const Wavevector& k = g.wavevector(i);
        if (std::abs(k[0]) > K || std::abs(k[1]) > K)
          for (int c = 0; c < 2; ++c) f(c, i) = 0.0;
      }
      return leray_project(f);
    };
    MhdState st = MhdState::zero(g);
    st.u = band(random_field(g, power_law_envelope(1.0 + 0.2 * m), rng, opts));
    st.b = band(random_field(g, power_law_envelope(1.0 + 0.2 * m), rng, opts));
    worst = std::max(worst, scaling_residual(st, 0.05, 2));
  }
  Detail d;
  d.num("max_residual", worst);
  return {worst <= 1e-9, d.str()};
}

// 11 ------------------------------------------------------------------------
Outcome ledger_order() {
  const LittlewoodPaley lp(Grid(2, 64), DyadicCutoff::build());
  const double nu = 0.05, s = 1.2, r = 2.2;
  const MhdState start = rough_state(lp.grid(), s, 1.0, 1.0, 11);
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "lpmhd_acceptance_ledger";
  std::filesystem::create_directories(dir);
  std::vector<double> res;
  for (double h : {1e-3, 5e-4, 2.5e-4}) {
    SolverParams p;
    p.nu = nu;
    p.dt = h / 4.0;
    const MhdState mid = run(start, p, start.t + h).final_state;
    const MhdState after = run(mid, p, start.t + 2.0 * h).final_state;
    save_checkpoint(dir / "before.lpmh", start);
    save_checkpoint(dir / "middle.lpmh", mid);
    save_checkpoint(dir / "after.lpmh", after);
    const LedgerIdentity li = ledger_identity(load_state(dir / "before.lpmh"), load_state(dir / "middle.lpmh"),
                                              load_state(dir / "after.lpmh"), nu, s, r, lp);
    res.push_back(std::abs(li.residual_u) + std::abs(li.residual_b));
  }
  const double o1 = std::log2(res[0] / res[1]), o2 = std::log2(res[1] / res[2]);
  Detail d;
  d.num("residual_h", res[0]).num("order_1", o1).num("order_2", o2);
  return {std::abs(o1 - 2.0) <= 0.25 && std::abs(o2 - 2.0) <= 0.25, d.str()};
}

// 12 ------------------------------------------------------------------------
Outcome propagation() {
  const Grid g(2, 256);
  const LittlewoodPaley lp(g, DyadicCutoff::build());
  const double s = 1.2, nu = 0.05;
  const InterpolationReport ir = interpolation_checks(g, 50, s, 1);
  StokesConfig sc;
  sc.s = s;
  const LogScanReport ls = log_scan(RoughDataSpec{s, 0.01, 1}, g, sc);
  const CalibrationResult cal = calibrate_constants(calibration_ensemble(g, s, 50, 1, 1.0), nu, s, lp,
                                                    ls.b / ls.data_hs_norm, ir.R_bb, ir.R_uu);
  PropagationConfig cfg;
  cfg.N = 256;
  cfg.s = s;
  cfg.nu = nu;
  const PropagationReport rep = propagation_experiment(cfg, cal.C_nu, cal.C_0);
  const bool strict = !rep.window.empty && rep.window.expF < 2.0 && rep.window.growth < 1.0;
  const bool finite = std::isfinite(rep.dissipation_bound) && std::isfinite(rep.l1_bound) &&
                      std::isfinite(rep.dissipation_integral) && std::isfinite(rep.l1_integral);
  Detail d;
  d.kv("verdict", rep.verdict)
      .num("C_nu", cal.C_nu)
      .num("C_0", cal.C_0)
      .num("T", rep.window.T)
      .kv("binding", rep.window.binding)
      .num("2-expF", 2.0 - rep.window.expF)
      .num("growth", rep.window.growth)
      .num("max_A/A0", rep.max_A_ratio)
      .num("dissipation", rep.dissipation_integral)
      .num("dissipation_bound", rep.dissipation_bound)
      .num("L1", rep.l1_integral)
      .num("L1_bound", rep.l1_bound)
      .num("resolution_change", rep.resolution_change)
      .kv("converged", rep.converged ? "yes" : "no");
  const bool verdict_ok = rep.verdict == "PASS" || (rep.verdict == "FAIL" && !rep.converged);
  return {verdict_ok && strict && finite, d.str()};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> body;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "LP reconstruction and partition of unity", 10, lp_reconstruction},
      {2, "block/direct norm equivalence", 30, norm_equivalence},
      {3, "Bernstein constant uniformity", 60, bernstein},
      {4, "Bony decomposition identity", 60, bony},
      {5, "commutator identity and constant drift", 60, commutator_law},
      {6, "transport cancellations", 60, cancellations},
      {7, "Stokes logarithmic law", 300, stokes_log_law},
      {8, "heat-sum bound", 5, heat_sum_bound},
      {9, "energy inequality of resolved runs", 300, energy_inequality},
      {10, "scaling symmetry", 30, scaling},
      {11, "ledger identity order", 120, ledger_order},
      {12, "propagation inside the predicted window", 900, propagation},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s [%2d] %s: %s (%.1f s of %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                c.budget_s, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
