#include "lpmhd/stokes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "lpmhd/error.hpp"
#include "lpmhd/operators.hpp"
#include "lpmhd/quadrature.hpp"
#include "lpmhd/random_fields.hpp"

namespace lpmhd {

void StokesConfig::validate(bool forced) const {
  if (!(nu > 0.0)) throw ParameterError("stokes: viscosity must be positive");
  if (!(alpha > 0.0)) throw ParameterError("stokes: fractional order must be positive");
  if (!(T > 0.0)) throw ParameterError("stokes: horizon must be positive");
  double prev = T;
  for (double e : eps_list) {
    if (!(e > 0.0 && e < T)) throw ParameterError("stokes: every delay must lie in (0, T)");
    if (!(e < prev)) throw ParameterError("stokes: delays must be strictly decreasing");
    prev = e;
  }
  if (forced) {
    if (!(dt > 0.0)) throw ParameterError("stokes: time step must be positive");
    if (!eps_list.empty() && dt > eps_list.back() / 10.0) {
      throw ParameterError("stokes: time step exceeds a tenth of the smallest delay");
    }
  }
}

namespace {

double decay_rate(double k2, const StokesConfig& cfg) { return k2 == 0.0 ? 0.0 : cfg.nu * std::pow(k2, cfg.alpha); }

SolenoidalField normalized(SpectralField f, double s) {
  SolenoidalField u = leray_project(f);
  SpectralField out = std::move(u).release();
  const double norm = sobolev_norm_direct(out, s, false);
  if (norm == 0.0) throw ParameterError("stokes: generated data vanishes on this grid");
  out *= 1.0 / norm;
  return SolenoidalField::trusted(std::move(out));
}

}  // namespace

SolenoidalField rough_data(const RoughDataSpec& spec, const Grid& grid) {
  const double sigma = spec.slope(grid.dimension());
  if (!(sigma > 0.5 * grid.dimension())) throw ParameterError("rough_data: slope must exceed n/2");
  Rng rng(spec.seed);
  RandomFieldOptions opts;
  opts.components = grid.dimension();
  opts.modulus = Modulus::kUnit;
  return normalized(random_field(grid, [sigma](double k) { return std::pow(k, -sigma); }, rng, opts), spec.s);
}

SolenoidalField smooth_data(double s, std::uint64_t seed, const Grid& grid) {
  Rng rng(seed);
  RandomFieldOptions opts;
  opts.components = grid.dimension();
  opts.modulus = Modulus::kUnit;
  auto envelope = [](double k) { return k <= 16.0 ? std::exp(-0.5 * k * k) : 0.0; };
  return normalized(random_field(grid, envelope, rng, opts), s);
}

SolenoidalField evolve_free(const SolenoidalField& u0, double t, const StokesConfig& cfg) {
  if (!(t >= 0.0)) throw ParameterError("evolve_free: time must be nonnegative");
  const Grid& g = u0.grid();
  SpectralField out = u0.field();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double factor = std::exp(-decay_rate(g.k2(i), cfg) * t);
    for (int c = 0; c < out.components(); ++c) out(c, i) *= factor;
  }
  return SolenoidalField::trusted(std::move(out));
}

std::vector<SolenoidalField> evolve_forced(const SolenoidalField& u0, const ForcingSeries& f,
                                           const StokesConfig& cfg) {
  if (f.samples.size() < 2) throw ParameterError("evolve_forced: need at least two forcing samples");
  if (!(f.dt > 0.0)) throw ParameterError("evolve_forced: sampling step must be positive");
  if (std::abs(f.dt - cfg.dt) > 1e-12 * cfg.dt) {
    throw ParameterError("evolve_forced: forcing sampled at a step different from the configured one");
  }
  const Grid& g = u0.grid();
  std::vector<SpectralField> pf;
  pf.reserve(f.samples.size());
  for (const auto& s : f.samples) {
    require_same_grid(g, s.grid(), "evolve_forced");
    if (s.components() != u0.field().components()) throw ParameterError("evolve_forced: forcing component mismatch");
    pf.push_back(std::move(leray_project(s)).release());
  }

  const double h = f.dt;
  std::vector<double> e(g.size()), phi1(g.size()), phi2(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double lam = decay_rate(g.k2(i), cfg);
    const double x = lam * h;
    e[i] = std::exp(-x);
    if (x < 1e-2) {
      phi1[i] = h * (1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0 + x * x * x * x / 120.0);
      phi2[i] = h * (0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0 + x * x * x * x / 720.0);
    } else {
      phi1[i] = -std::expm1(-x) / lam;
      phi2[i] = h * (x + std::expm1(-x)) / (x * x);
    }
  }

  std::vector<SolenoidalField> traj;
  traj.reserve(pf.size());
  traj.push_back(u0);
  SpectralField u = u0.field();
  for (std::size_t j = 0; j + 1 < pf.size(); ++j) {
    for (int c = 0; c < u.components(); ++c) {
      auto uc = u.component(c);
      auto f0 = pf[j].component(c);
      auto f1 = pf[j + 1].component(c);
      for (std::size_t i = 0; i < g.size(); ++i) {
        uc[i] = e[i] * uc[i] + phi1[i] * f0[i] + phi2[i] * (f1[i] - f0[i]);
      }
    }
    traj.push_back(SolenoidalField::trusted(u));
  }
  return traj;
}

MaximalRegularityIntegrand::MaximalRegularityIntegrand(const SpectralField& u0, const StokesConfig& cfg) {
  const Grid& g = u0.grid();
  std::map<double, double> shells;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double k2 = g.k2(i);
    if (k2 == 0.0) continue;
    double amp2 = 0.0;
    for (int c = 0; c < u0.components(); ++c) amp2 += std::norm(u0(c, i));
    if (amp2 == 0.0) continue;
    shells[k2] += std::pow(k2, cfg.alpha) * std::pow(1.0 + k2, cfg.s + cfg.alpha) * amp2;
  }
  for (const auto& [k2, w] : shells) {
    rate_.push_back(2.0 * decay_rate(k2, cfg));
    weight_.push_back(w);
  }
}

double MaximalRegularityIntegrand::operator()(double t) const {
  double sum = 0.0;
  for (std::size_t m = 0; m < rate_.size(); ++m) sum += weight_[m] * std::exp(-rate_[m] * t);
  return std::sqrt(sum);
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("fit_line: need matching samples, at least two");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw ParameterError("fit_line: abscissae coincide");
  LinearFit fit;
  fit.b = sxy / sxx;
  fit.a = my - fit.b * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.a - fit.b * x[i];
    sse += r * r;
  }
  fit.r2 = syy == 0.0 ? 1.0 : 1.0 - sse / syy;
  return fit;
}

LogScanReport log_scan(const SolenoidalField& u0, const StokesConfig& cfg, double rel_tol) {
  cfg.validate();
  if (cfg.eps_list.size() < 2) throw ParameterError("log_scan: need at least two delays");
  const MaximalRegularityIntegrand integrand(u0.field(), cfg);
  LogScanReport report;
  report.data_hs_norm = sobolev_norm_direct(u0.field(), cfg.s, false);

  // Integrate panel by panel from T down, so every J(ε) reuses the pieces above it.
  std::vector<double> L, J;
  double acc = 0.0, err = 0.0, upper = cfg.T;
  for (double eps : cfg.eps_list) {
    const auto q = integrate_geometric([&](double t) { return integrand(t); }, eps, upper, rel_tol);
    acc += q.value;
    err += q.error_estimate;
    upper = eps;
    report.rows.push_back({eps, acc, 0.0, err});
    L.push_back(std::log(cfg.T / eps));
    J.push_back(acc);
  }
  const LinearFit fit = fit_line(L, J);
  report.a = fit.a;
  report.b = fit.b;
  report.r2 = fit.r2;
  for (std::size_t i = 0; i < report.rows.size(); ++i) report.rows[i].fitted = fit.a + fit.b * L[i];
  return report;
}

LogScanReport log_scan(const RoughDataSpec& spec, const Grid& grid, const StokesConfig& cfg, double rel_tol) {
  RoughDataSpec adjusted = spec;
  adjusted.s = cfg.s;
  return log_scan(rough_data(adjusted, grid), cfg, rel_tol);
}

double heat_sum(double nu, double alpha, double t, int* terms) {
  if (!(t > 0.0)) throw ParameterError("heat_sum: time must be positive");
  if (!(nu > 0.0) || !(alpha > 0.0)) throw ParameterError("heat_sum: viscosity and order must be positive");
  double sum = 0.0, prev = 0.0;
  int count = 0;
  for (int q = -1;; ++q) {
    const double lam = std::ldexp(1.0, q);
    const double term = std::pow(lam, alpha) * std::exp(-nu * std::pow(lam, 2.0 * alpha) * t / 4.0);
    sum += term;
    ++count;
    if (term < 1e-16 && term <= prev) break;
    if (q > 4000) throw NumericalError("heat_sum: series did not terminate");
    prev = term;
  }
  if (terms) *terms = count;
  return sum;
}

HeatSumReport heat_sum_check(double nu, double alpha, const std::vector<double>& t_list) {
  HeatSumReport report;
  report.nu = nu;
  report.alpha = alpha;
  for (double t : t_list) {
    HeatSumRow row;
    row.t = t;
    row.series = heat_sum(nu, alpha, t, &row.terms);
    row.ratio = row.series * std::sqrt(nu * t);
    report.sup_ratio = std::max(report.sup_ratio, row.ratio);
    report.rows.push_back(row);
  }
  return report;
}

std::vector<double> log_space(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw ParameterError("log_space: need 0 < lo <= hi and n >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) out[i] = std::exp(a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace lpmhd
