#include "lpmhd/mhd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lpmhd/fft.hpp"
#include "lpmhd/operators.hpp"

namespace lpmhd {

MhdState MhdState::zero(const Grid& grid, double t) {
  return {SolenoidalField::trusted(SpectralField(grid, grid.dimension())),
          SolenoidalField::trusted(SpectralField(grid, grid.dimension())), t};
}

void SolverParams::validate() const {
  if (!(nu > 0.0)) throw ParameterError("mhd: viscosity must be positive");
  if (!(dt > 0.0)) throw ParameterError("mhd: time step must be positive");
  if (!(blowup_factor > 1.0)) throw ParameterError("mhd: blow-up factor must exceed 1");
  if (!(cfl_limit > 0.0)) throw ParameterError("mhd: CFL limit must be positive");
  if (diagnostics_every < 1) throw ParameterError("mhd: diagnostics cadence must be at least 1");
}

namespace {

// Two real fields share one complex transform: f + i g ↔ f̂ + i ĝ.
class PairedTransforms {
 public:
  explicit PairedTransforms(const Grid& g) : g_(g), spec_(g.size()), phys_(g.size()) {}

  void inverse(std::span<const Complex> fa, std::span<const Complex> fb, std::vector<double>& a,
               std::vector<double>& b) {
    for (std::size_t i = 0; i < spec_.size(); ++i) {
      spec_[i] = Complex(fa[i].real() - fb[i].imag(), fa[i].imag() + fb[i].real());
    }
    inverse_transform(g_, spec_, phys_);
    a.resize(phys_.size());
    b.resize(phys_.size());
    for (std::size_t i = 0; i < phys_.size(); ++i) {
      a[i] = phys_[i].real();
      b[i] = phys_[i].imag();
    }
  }

  void forward(const std::vector<double>& a, const std::vector<double>& b, std::span<Complex> fa,
               std::span<Complex> fb) {
    for (std::size_t i = 0; i < phys_.size(); ++i) phys_[i] = Complex(a[i], b[i]);
    forward_transform(g_, phys_, spec_);
    for (std::size_t i = 0; i < spec_.size(); ++i) {
      const Complex z = spec_[i];
      const Complex zc = std::conj(spec_[g_.conjugate_index(i)]);
      fa[i] = 0.5 * (z + zc);
      const Complex d = z - zc;
      fb[i] = Complex(0.5 * d.imag(), -0.5 * d.real());
    }
  }

 private:
  const Grid& g_;
  std::vector<Complex> spec_;
  std::vector<Complex> phys_;
};

struct Nonlinear {
  SpectralField du;
  SpectralField db;
  double u_max = 0.0;
  double b_max = 0.0;
};

double pointwise_max(const std::vector<std::vector<double>>& comps) {
  double m = 0.0;
  for (std::size_t i = 0; i < comps.front().size(); ++i) {
    double s = 0.0;
    for (const auto& c : comps) s += c[i] * c[i];
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

// Transport terms only: du = P(−u·∇u + b·∇b), db = −u·∇b + b·∇u.
Nonlinear nonlinear(const SpectralField& u, const SpectralField& b) {
  const Grid& g = u.grid();
  const int n = g.dimension();
  const std::size_t size = g.size();

  // Spectral sources: u_c, b_c, ∂_j u_c, ∂_j b_c.
  std::vector<std::vector<Complex>> src;
  src.reserve(static_cast<std::size_t>(2 * (n + n * n) + 1));
  auto push_copy = [&](std::span<const Complex> f) { src.emplace_back(f.begin(), f.end()); };
  auto push_deriv = [&](std::span<const Complex> f, int j) {
    std::vector<Complex> d(size);
    for (std::size_t i = 0; i < size; ++i) {
      const double kj = g.wavevector(i)[j];
      d[i] = Complex(-kj * f[i].imag(), kj * f[i].real());
    }
    src.push_back(std::move(d));
  };
  for (int c = 0; c < n; ++c) push_copy(u.component(c));
  for (int c = 0; c < n; ++c) push_copy(b.component(c));
  for (int c = 0; c < n; ++c)
    for (int j = 0; j < n; ++j) push_deriv(u.component(c), j);
  for (int c = 0; c < n; ++c)
    for (int j = 0; j < n; ++j) push_deriv(b.component(c), j);
  if (src.size() % 2) src.emplace_back(size);

  PairedTransforms pt(g);
  std::vector<std::vector<double>> phys(src.size());
  for (std::size_t m = 0; m < src.size(); m += 2) pt.inverse(src[m], src[m + 1], phys[m], phys[m + 1]);
  src.clear();

  auto U = [&](int c) -> const std::vector<double>& { return phys[c]; };
  auto B = [&](int c) -> const std::vector<double>& { return phys[n + c]; };
  auto dU = [&](int c, int j) -> const std::vector<double>& { return phys[2 * n + c * n + j]; };
  auto dB = [&](int c, int j) -> const std::vector<double>& { return phys[2 * n + n * n + c * n + j]; };

  Nonlinear out{SpectralField(g, n), SpectralField(g, n), 0.0, 0.0};
  {
    std::vector<std::vector<double>> uc(n), bc(n);
    for (int c = 0; c < n; ++c) {
      uc[c] = U(c);
      bc[c] = B(c);
    }
    out.u_max = pointwise_max(uc);
    out.b_max = pointwise_max(bc);
  }

  std::vector<std::vector<double>> prod(static_cast<std::size_t>(2 * n), std::vector<double>(size, 0.0));
  for (int c = 0; c < n; ++c) {
    double* pu = prod[c].data();
    double* pb = prod[n + c].data();
    for (int j = 0; j < n; ++j) {
      const double* uj = U(j).data();
      const double* bj = B(j).data();
      const double* duc = dU(c, j).data();
      const double* dbc = dB(c, j).data();
      for (std::size_t i = 0; i < size; ++i) {
        pu[i] += bj[i] * dbc[i] - uj[i] * duc[i];
        pb[i] += bj[i] * duc[i] - uj[i] * dbc[i];
      }
    }
  }
  std::vector<std::span<Complex>> dst;
  for (int c = 0; c < n; ++c) dst.push_back(out.du.component(c));
  for (int c = 0; c < n; ++c) dst.push_back(out.db.component(c));
  std::vector<Complex> scratch(size);
  if (prod.size() % 2) {
    prod.emplace_back(size, 0.0);
    dst.push_back(scratch);
  }
  for (std::size_t m = 0; m < prod.size(); m += 2) pt.forward(prod[m], prod[m + 1], dst[m], dst[m + 1]);

  out.du.dealias();
  out.db.dealias();
  leray_project_in_place(out.du);
  return out;
}

double cfl_of(double dt, double u_max, double b_max, int N) { return dt * std::max(u_max, b_max) * N; }

void check_cfl(double cfl, double limit, double t) {
  if (cfl > limit) {
    std::ostringstream msg;
    msg << "CFL number " << cfl << " exceeds " << limit << " at t = " << t;
    throw CflError(msg.str());
  }
}

bool all_finite(const SpectralField& f) {
  for (int c = 0; c < f.components(); ++c)
    for (const Complex& z : f.component(c))
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

}  // namespace

double cfl_number(const MhdState& state, const SolverParams& params) {
  return params.dt * std::max(linf_norm(state.u.field()), linf_norm(state.b.field())) * state.grid().points();
}

MhdRhs rhs_unchecked(const MhdState& state, double nu) {
  require_same_grid(state.u.grid(), state.b.grid(), "mhd rhs");
  Nonlinear nl = nonlinear(state.u.field(), state.b.field());
  const Grid& g = state.grid();
  for (int c = 0; c < g.dimension(); ++c) {
    auto du = nl.du.component(c);
    auto u = state.u.field().component(c);
    for (std::size_t i = 0; i < g.size(); ++i) du[i] -= nu * g.k2(i) * u[i];
  }
  return {std::move(nl.du), std::move(nl.db)};
}

MhdRhs rhs(const MhdState& state, const SolverParams& params) {
  check_cfl(cfl_number(state, params), params.cfl_limit, state.t);
  return rhs_unchecked(state, params.nu);
}

MhdState step(const MhdState& state, const SolverParams& params) {
  require_same_grid(state.u.grid(), state.b.grid(), "mhd step");
  const Grid& g = state.grid();
  const int n = g.dimension();
  const double h = params.dt;
  std::vector<double> E(g.size()), Eh(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    E[i] = std::exp(-params.nu * g.k2(i) * h);
    Eh[i] = std::exp(-0.5 * params.nu * g.k2(i) * h);
  }
  auto scale_u = [&](SpectralField& f, const std::vector<double>& fac) {
    for (int c = 0; c < n; ++c) {
      auto comp = f.component(c);
      for (std::size_t i = 0; i < g.size(); ++i) comp[i] *= fac[i];
    }
  };

  const SpectralField& u0 = state.u.field();
  const SpectralField& b0 = state.b.field();
  Nonlinear k1 = nonlinear(u0, b0);
  check_cfl(cfl_of(h, k1.u_max, k1.b_max, g.points()), params.cfl_limit, state.t);

  SpectralField u2 = u0 + (0.5 * h) * k1.du;
  scale_u(u2, Eh);
  Nonlinear k2 = nonlinear(u2, b0 + (0.5 * h) * k1.db);

  SpectralField u3 = u0;
  scale_u(u3, Eh);
  u3 += (0.5 * h) * k2.du;
  Nonlinear k3 = nonlinear(u3, b0 + (0.5 * h) * k2.db);

  SpectralField u4 = u0;
  scale_u(u4, E);
  SpectralField k3e = k3.du;
  scale_u(k3e, Eh);
  u4 += h * k3e;
  Nonlinear k4 = nonlinear(u4, b0 + h * k3.db);

  SpectralField un = u0;
  scale_u(un, E);
  SpectralField acc = k1.du;
  scale_u(acc, E);
  SpectralField mid = k2.du + k3.du;
  scale_u(mid, Eh);
  acc += 2.0 * mid;
  acc += k4.du;
  un += (h / 6.0) * acc;

  SpectralField bn = b0;
  SpectralField bacc = k1.db;
  bacc += 2.0 * (k2.db + k3.db);
  bacc += k4.db;
  bn += (h / 6.0) * bacc;

  if (!all_finite(un) || !all_finite(bn)) {
    std::ostringstream msg;
    msg << "non-finite state after step from t = " << state.t;
    throw BlowUpError(msg.str(), state);
  }
  MhdState next{SolenoidalField::trusted(std::move(un)),
                params.reproject_b ? leray_project(bn) : SolenoidalField::trusted(std::move(bn)), state.t + h};
  return next;
}

double regularity_functional_direct(const MhdState& state, double s) {
  const double a = sobolev_norm_direct(state.u.field(), s, true);
  const double b = sobolev_norm_direct(state.b.field(), s + 1.0, true);
  return a * a + b * b;
}

Diagnostics diagnose(const MhdState& state, double s) {
  const Grid& g = state.grid();
  Diagnostics d;
  d.t = state.t;
  const double cut = 2.0 / 3.0 * g.max_retained_wavenumber();
  double tail = 0.0;
  for (int c = 0; c < g.dimension(); ++c) {
    auto u = state.u.field().component(c);
    auto b = state.b.field().component(c);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double eu = std::norm(u[i]);
      const double eb = std::norm(b[i]);
      d.energy_u += eu;
      d.energy_b += eb;
      d.dissipation += g.k2(i) * eu;
      if (g.kabs(i) > cut) tail += eu + eb;
    }
  }
  const double e = d.energy_u + d.energy_b;
  d.tail_fraction = e > 0.0 ? tail / e : 0.0;
  d.A = regularity_functional_direct(state, s);
  d.div_u = divergence_defect(state.u.field());
  d.div_b = divergence_defect(state.b.field());
  return d;
}

RunResult run(const MhdState& initial, const SolverParams& params, double t_end, const StepObserver& observer) {
  params.validate();
  if (!(t_end >= initial.t)) throw ParameterError("mhd run: end time precedes the initial time");
  RunResult result{initial, {}, false, 0.0, {}, 0};
  const Diagnostics d0 = diagnose(initial, params.s);
  const double A0 = d0.A;
  result.series.push_back(d0);
  if (observer) observer(initial, 0);

  const double eps = 1e-12 * std::max(1.0, std::abs(t_end));
  SolverParams p = params;
  MhdState state = initial;
  while (state.t < t_end - eps) {
    p.dt = std::min(params.dt, t_end - state.t);
    try {
      state = step(state, p);
    } catch (const BlowUpError& e) {
      result.blew_up = true;
      result.failure_time = e.last_valid().t;
      result.failure = e.what();
      result.final_state = e.last_valid();
      return result;
    }
    ++result.steps;
    const bool last = state.t >= t_end - eps;
    const double A = regularity_functional_direct(state, params.s);
    const bool exploded = A0 > 0.0 && A > params.blowup_factor * A0;
    if (last || exploded || result.steps % params.diagnostics_every == 0) {
      result.series.push_back(diagnose(state, params.s));
    }
    if (observer) observer(state, result.steps);
    if (exploded) {
      std::ostringstream msg;
      msg << "regularity functional grew by more than " << params.blowup_factor << " at t = " << state.t;
      result.blew_up = true;
      result.failure_time = state.t;
      result.failure = msg.str();
      break;
    }
  }
  result.final_state = std::move(state);
  return result;
}

EnergyReport energy_report(const std::vector<Diagnostics>& series, double nu, double tolerance,
                           double tail_tolerance) {
  EnergyReport rep;
  if (series.empty()) return rep;
  rep.initial_energy = series.front().energy();
  double cumulative = 0.0;
  double g_min = std::numeric_limits<double>::infinity();
  double g_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (i > 0) {
      cumulative += 0.5 * (series[i].t - series[i - 1].t) * (series[i].dissipation + series[i - 1].dissipation);
    }
    const double G = series[i].energy() + 2.0 * nu * cumulative;
    if (i > 0) {
      rep.max_D = std::max(rep.max_D, G - g_min);
      rep.max_abs_D = std::max({rep.max_abs_D, std::abs(G - g_min), std::abs(G - g_max)});
    }
    g_min = std::min(g_min, G);
    g_max = std::max(g_max, G);
    rep.balance.push_back(G - series.front().energy());
    rep.max_tail_fraction = std::max(rep.max_tail_fraction, series[i].tail_fraction);
  }
  rep.spurious = rep.max_D > tolerance * rep.initial_energy;
  rep.under_resolved = rep.max_tail_fraction > tail_tolerance;
  return rep;
}

EnergyReport energy_report(const std::vector<MhdState>& history, double nu, double tolerance,
                           double tail_tolerance) {
  std::vector<Diagnostics> series;
  series.reserve(history.size());
  for (const auto& s : history) series.push_back(diagnose(s, 1.0));
  return energy_report(series, nu, tolerance, tail_tolerance);
}

SpectralField dilate(const SpectralField& f, int lambda) {
  if (lambda < 1) throw ParameterError("dilate: scale must be a positive integer");
  const Grid& g = f.grid();
  const int box = g.dealias_cutoff();
  SpectralField out(g, f.components());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.nyquist(i)) continue;
    Wavevector k = g.wavevector(i);
    bool inside = true;
    for (int d = 0; d < g.dimension(); ++d) {
      k[d] *= lambda;
      inside = inside && std::abs(k[d]) <= box;
    }
    if (!inside) continue;
    const std::size_t j = g.flat_index(k);
    for (int c = 0; c < f.components(); ++c) out(c, j) = f(c, i);
  }
  return out;
}

MhdState scale_state(const MhdState& state, int lambda) {
  SpectralField u = dilate(state.u.field(), lambda);
  SpectralField b = dilate(state.b.field(), lambda);
  u *= lambda;
  b *= lambda;
  return {SolenoidalField::trusted(std::move(u)), SolenoidalField::trusted(std::move(b)), state.t};
}

double scaling_residual(const MhdState& state, double nu, int lambda) {
  const Grid& g = state.grid();
  if (lambda < 1 || g.points() % lambda != 0) {
    throw ParameterError("scaling_residual: scale must be a positive divisor of N");
  }
  const int limit = g.dealias_cutoff() / lambda;
  for (const SpectralField* f : {&state.u.field(), &state.b.field()}) {
    for (int c = 0; c < f->components(); ++c) {
      auto comp = f->component(c);
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (comp[i] == Complex{}) continue;
        for (int d = 0; d < g.dimension(); ++d) {
          if (std::abs(g.wavevector(i)[d]) > limit) {
            std::ostringstream msg;
            msg << "scaling_residual: state not band-limited to |k_i| <= " << limit << " for scale " << lambda;
            throw ParameterError(msg.str());
          }
        }
      }
    }
  }
  const MhdRhs r0 = rhs_unchecked(state, nu);
  const MhdRhs rs = rhs_unchecked(scale_state(state, lambda), nu);
  const double l3 = static_cast<double>(lambda) * lambda * lambda;
  SpectralField eu = dilate(r0.du, lambda);
  SpectralField eb = dilate(r0.db, lambda);
  eu *= l3;
  eb *= l3;
  const double den2 = inner_product(eu, eu) + inner_product(eb, eb);
  const SpectralField du = rs.du - eu;
  const SpectralField db = rs.db - eb;
  const double num = std::sqrt(inner_product(du, du) + inner_product(db, db));
  if (den2 == 0.0) return num;
  return num / std::sqrt(den2);
}

MhdState orszag_tang(const Grid& grid) {
  if (grid.dimension() != 2) throw ParameterError("Orszag-Tang data is two-dimensional");
  const int N = grid.points();
  PhysicalField u{{std::vector<double>(grid.size()), std::vector<double>(grid.size())}};
  PhysicalField b = u;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const double x = 2.0 * M_PI * i / N, y = 2.0 * M_PI * j / N;
      const std::size_t f = static_cast<std::size_t>(i) * N + j;
      u.components[0][f] = -std::sin(y);
      u.components[1][f] = std::sin(x);
      b.components[0][f] = -std::sin(y);
      b.components[1][f] = std::sin(2.0 * x);
    }
  }
  return {leray_project(to_spectral(grid, u)), leray_project(to_spectral(grid, b)), 0.0};
}

}  // namespace lpmhd
