#include "lpmhd/energy_ledger.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "lpmhd/error.hpp"
#include "lpmhd/operators.hpp"
#include "lpmhd/parallel.hpp"
#include "lpmhd/paraproduct.hpp"
#include "lpmhd/random_fields.hpp"

namespace lpmhd {

void require_admissible(int dimension, double s, double r) {
  const double half = 0.5 * dimension;
  if (!(s > half - 1.0)) {
    std::ostringstream msg;
    msg << "regularity s = " << s << " must exceed n/2 - 1 = " << half - 1.0;
    throw ParameterError(msg.str());
  }
  if (!(r > half && r <= s + 1.0)) {
    std::ostringstream msg;
    msg << "exponent r = " << r << " must satisfy n/2 < r <= s + 1 (n/2 = " << half << ", s + 1 = " << s + 1.0
        << ")";
    throw ParameterError(msg.str());
  }
}

namespace {

double weight(int q, double sigma) { return std::pow(dyadic_scale(q), 2.0 * sigma); }

}  // namespace

FluxTerms flux_terms(const MhdState& state, double s, double r, const LittlewoodPaley& lp) {
  const Grid& g = lp.grid();
  require_same_grid(g, state.u.grid(), "flux_terms");
  require_same_grid(g, state.b.grid(), "flux_terms");
  require_admissible(g.dimension(), s, r);
  const SpectralField& u = state.u.field();
  const SpectralField& b = state.b.field();
  const int top = lp.q_max();
  const LPBlocks U = lp.decompose(u);
  const LPBlocks B = lp.decompose(b);

  // Index p + 1: low-pass u_{≤p−2}, b_{≤p−2} (zero for p − 2 < −1) and ũ_p, b̃_p.
  std::vector<SpectralField> lowU, lowB, tilU, tilB;
  for (int p = -1; p <= top; ++p) {
    lowU.push_back(lp.low_pass(u, p - 2));
    lowB.push_back(lp.low_pass(b, p - 2));
    tilU.push_back(U.tilde_block(p));
    tilB.push_back(B.tilde_block(p));
  }
  auto at = [](std::vector<SpectralField>& v, int p) -> const SpectralField& { return v[p + 1]; };

  FluxTerms f;
  f.s = s;
  f.r = r;
  for (int q = -1; q <= top; ++q) {
    const double wu = weight(q, s);
    const double wb = weight(q, r);
    const SpectralField& uq = U.block(q);
    const SpectralField& bq = B.block(q);
    auto pair_u = [&](const SpectralField& x) { return wu * inner_product(lp.block(x, q), uq); };
    auto pair_b = [&](const SpectralField& x) { return wb * inner_product(lp.block(x, q), bq); };

    SpectralField du_sum(g, u.components()), db_sum(g, b.components());
    for (int p = std::max(-1, q - 2); p <= std::min(top, q + 2); ++p) {
      const SpectralField& up = U.block(p);
      const SpectralField& bp = B.block(p);
      const SpectralField& lu = at(lowU, p);
      const SpectralField& lb = at(lowB, p);
      const SpectralField qup = lp.block(up, q);
      const SpectralField qbp = lp.block(bp, q);
      du_sum += qup;
      db_sum += qbp;
      const SpectralField shift = lu - at(lowU, q);

      f.I11 += pair_u(transport(lu, up));
      f.I111 += wu * inner_product(commutator(lp, q, p, state.u, u), uq);
      f.I113 += wu * inner_product(transport(shift, qup), uq);
      f.I12 += pair_u(transport(up, lu));
      f.I21 -= pair_u(transport(lb, bp));
      f.I22 -= pair_u(transport(bp, lb));

      f.I31 += pair_b(transport(lu, bp));
      f.I311 += wb * inner_product(commutator(lp, q, p, state.u, b), bq);
      f.I313 += wb * inner_product(transport(shift, qbp), bq);
      f.I32 += pair_b(transport(up, lb));
      f.I41 -= pair_b(transport(lb, up));
      f.I42 -= pair_b(transport(bp, lu));
    }
    f.I112 += wu * inner_product(transport(at(lowU, q), du_sum), uq);
    f.I312 += wb * inner_product(transport(at(lowU, q), db_sum), bq);

    for (int p = std::max(-1, q - 2); p <= top; ++p) {
      const SpectralField& up = U.block(p);
      f.I13 += pair_u(transport(up, at(tilU, p)));
      f.I23 -= pair_u(transport(B.block(p), at(tilB, p)));
      f.I33 += pair_b(transport(up, at(tilB, p)));
      f.I43 -= pair_b(transport(at(tilB, p), up));
    }
  }

  const FluxTotals t = flux_totals(state, s, r, lp);
  f.I1 = t.I1;
  f.I2 = t.I2;
  f.I3 = t.I3;
  f.I4 = t.I4;
  return f;
}

BlockWeights::BlockWeights(const LittlewoodPaley& lp, double sigma) : w_(lp.grid().size(), 0.0) {
  for (int q = -1; q <= lp.q_max(); ++q) {
    const double lam = weight(q, sigma);
    for (std::size_t i = 0; i < w_.size(); ++i) {
      const double phi = lp.symbol(q, i);
      w_[i] += lam * phi * phi;
    }
  }
}

double BlockWeights::operator()(const SpectralField& f) const {
  double sum = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    auto comp = f.component(c);
    for (std::size_t i = 0; i < w_.size(); ++i) sum += w_[i] * std::norm(comp[i]);
  }
  return sum;
}

namespace {

// Σ_k w_k Re(f̂_k conj(ĝ_k)) with the block weights: Σ_q λ_q^{2σ}⟨Δ_q f, Δ_q g⟩.
double weighted_pairing(const LittlewoodPaley& lp, double sigma, const SpectralField& f, const SpectralField& g) {
  double sum = 0.0;
  for (int q = -1; q <= lp.q_max(); ++q) {
    const double lam = weight(q, sigma);
    double part = 0.0;
    for (int c = 0; c < f.components(); ++c) {
      auto a = f.component(c);
      auto b = g.component(c);
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double phi = lp.symbol(q, i);
        if (phi == 0.0) continue;
        part += phi * phi * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
      }
    }
    sum += lam * part;
  }
  return sum;
}

}  // namespace

FluxTotals flux_totals(const MhdState& state, double s, double r, const LittlewoodPaley& lp) {
  require_same_grid(lp.grid(), state.u.grid(), "flux_totals");
  require_admissible(lp.grid().dimension(), s, r);
  const SpectralField& u = state.u.field();
  const SpectralField& b = state.b.field();
  FluxTotals t;
  t.I1 = weighted_pairing(lp, s, transport(u, u), u);
  t.I2 = -weighted_pairing(lp, s, transport(b, b), u);
  t.I3 = weighted_pairing(lp, r, transport(u, b), b);
  t.I4 = -weighted_pairing(lp, r, transport(b, u), b);
  return t;
}

double A_of_t(const MhdState& state, double s, const LittlewoodPaley& lp) {
  const double a = block_sobolev_norm(lp.decompose(state.u.field()), s);
  const double b = block_sobolev_norm(lp.decompose(state.b.field()), s + 1.0);
  return a * a + b * b;
}

// ---------------------------------------------------------------------------

InterpolationRatios interpolation_ratios(const SolenoidalField& u, const SolenoidalField& b, double s) {
  const int n = u.grid().dimension();
  const double theta = 1.0 - n / (2.0 * (s + 1.0));
  InterpolationRatios r;
  const double bn = sobolev_norm_direct(b.field(), s + 1.0, false);
  if (bn > 0.0) r.R_bb = sobolev_norm_direct(transport(b.field(), b.field()), s, false) / (bn * bn);
  const double u2 = l2_norm(u.field());
  const double un = sobolev_norm_direct(u.field(), s + 1.0, false);
  if (u2 > 0.0 && un > 0.0) {
    r.R_uu = sobolev_norm_direct(transport(u.field(), u.field()), s, false) /
             (std::pow(u2, theta) * std::pow(un, 2.0 - theta));
  }
  return r;
}

InterpolationReport interpolation_checks(const Grid& grid, int samples, double s, std::uint64_t seed) {
  if (samples < 1) throw ParameterError("interpolation_checks: empty ensemble");
  require_admissible(grid.dimension(), s, s + 1.0);
  Rng rng(seed);
  const double base = s + 1.0 + 0.5 * grid.dimension();
  std::uniform_real_distribution<double> slope(base + 0.5, base + 3.0);
  InterpolationReport rep;
  rep.s = s;
  rep.samples = samples;
  for (int m = 0; m < samples; ++m) {
    const SolenoidalField u = random_solenoidal(grid, power_law_envelope(slope(rng)), rng);
    const SolenoidalField b = random_solenoidal(grid, power_law_envelope(slope(rng)), rng);
    const InterpolationRatios r = interpolation_ratios(u, b, s);
    rep.R_bb = std::max(rep.R_bb, r.R_bb);
    rep.R_uu = std::max(rep.R_uu, r.R_uu);
  }
  return rep;
}

// ---------------------------------------------------------------------------

PropagationConstants PropagationConstants::build(int n, double s, double nu, double t0, double A0, double M0,
                                                  double C_nu, double C_0, double gamma1, double gamma2,
                                                  double gamma3) {
  if (!(s > 0.5 * n - 1.0)) throw ParameterError("propagation constants: s must exceed n/2 - 1");
  if (!(nu > 0.0) || !(t0 > 0.0)) throw ParameterError("propagation constants: need nu > 0 and t0 > 0");
  if (!(A0 >= 0.0) || !(M0 >= 0.0)) throw ParameterError("propagation constants: A0 and M0 must be nonnegative");
  if (!(C_nu >= 0.0) || !(C_0 >= 0.0)) throw ParameterError("propagation constants: prefactors must be nonnegative");
  if (!(gamma1 > 0.0 && gamma2 > 0.0 && gamma3 > 0.0)) {
    throw ParameterError("propagation constants: exponents gamma must be positive");
  }
  PropagationConstants pc;
  pc.n = n;
  pc.s = s;
  pc.nu = nu;
  pc.t0 = t0;
  pc.A0 = A0;
  pc.M0 = M0;
  pc.C_nu = C_nu;
  pc.C_0 = C_0;
  pc.gamma1 = gamma1;
  pc.gamma2 = gamma2;
  pc.gamma3 = gamma3;
  pc.beta = 4.0 * (s + 1.0) / (2.0 * (s + 1.0) + n);
  pc.theta = 1.0 - n / (2.0 * (s + 1.0));
  if (!(pc.beta > 1.0) || !(pc.theta > 0.0 && pc.theta < 1.0)) {
    throw ParameterError("propagation constants: beta > 1 and theta in (0, 1) violated");
  }
  const double a = 4.0 * A0;
  pc.M1 = C_nu * (std::pow(a, 1.0 + gamma1) + std::pow(a, 1.0 + gamma2) + std::pow(a, 1.0 + gamma3)) + C_nu * a * a;
  return pc;
}

double continuation_functional(const PropagationConstants& pc, double u0_Hs, double T) {
  if (!(T >= pc.t0)) throw ParameterError("continuation functional: T precedes t0");
  const double b = pc.beta;
  const double log_term = pc.C_nu * std::log(T / pc.t0) * u0_Hs;
  const double inner = std::pow(pc.A0, b) * T + std::pow(pc.M0, 0.5 * pc.theta * b) * (pc.A0 + pc.M1 * T) / pc.nu;
  const double int_term = pc.C_nu * std::pow(T - pc.t0, 1.0 - 1.0 / b) * std::pow(inner, 1.0 / b);
  return log_term + int_term;
}

namespace {

constexpr const char* kExpConstraint = "exp(F) < 2";
constexpr const char* kGrowthConstraint = "2 M1 (T - t0) / A0 < 1";

double growth_of(const PropagationConstants& pc, double T) {
  if (pc.A0 == 0.0) return 0.0;
  return 2.0 * pc.M1 * (T - pc.t0) / pc.A0;
}

}  // namespace

Window predicted_window(const PropagationConstants& pc, double u0_Hs, double T_search, double min_window) {
  if (!(T_search > pc.t0)) throw ParameterError("predicted_window: search limit must exceed t0");
  auto fails = [&](double T) -> const char* {
    if (!(std::exp(continuation_functional(pc, u0_Hs, T)) < 2.0)) return kExpConstraint;
    if (!(growth_of(pc, T) < 1.0)) return kGrowthConstraint;
    return nullptr;
  };
  Window w;
  double lo = pc.t0, hi = T_search;
  const char* binding = fails(T_search);
  if (binding == nullptr) {
    lo = T_search;
    w.binding = "search limit";
  } else {
    for (int it = 0; it < 2000; ++it) {
      const double mid = lo + 0.5 * (hi - lo);
      if (mid <= lo || mid >= hi) break;
      if (const char* f = fails(mid)) {
        hi = mid;
        binding = f;
      } else {
        lo = mid;
      }
      if (lo > pc.t0 && hi - lo <= 1e-6 * (lo - pc.t0)) break;
    }
    w.binding = binding;
  }
  w.T = lo;
  w.F = continuation_functional(pc, u0_Hs, lo);
  w.expF = std::exp(w.F);
  w.growth = growth_of(pc, lo);
  if (!(lo > pc.t0) || lo - pc.t0 < min_window) {
    w.empty = true;
    std::ostringstream msg;
    msg << "window length " << lo - pc.t0 << " below the minimum " << min_window << "; binding constraint "
        << w.binding;
    w.reason = msg.str();
  }
  return w;
}

// ---------------------------------------------------------------------------

LedgerIdentity ledger_identity(const MhdState& before, const MhdState& middle, const MhdState& after, double nu,
                               double s, double r, const LittlewoodPaley& lp) {
  const double h1 = middle.t - before.t;
  const double h2 = after.t - middle.t;
  if (!(h1 > 0.0) || std::abs(h1 - h2) > 1e-9 * h1) {
    throw ParameterError("ledger_identity: states must be equally spaced in time");
  }
  const BlockWeights ws(lp, s), wr(lp, r), ws1(lp, s + 1.0);
  LedgerIdentity li;
  li.h = h1;
  li.du_dt_fd = 0.5 * (ws(after.u.field()) - ws(before.u.field())) / (2.0 * h1);
  li.db_dt_fd = 0.5 * (wr(after.b.field()) - wr(before.b.field())) / (2.0 * h1);
  const FluxTotals t = flux_totals(middle, s, r, lp);
  const double grad = ws(gradient(middle.u.field()));
  li.du_dt_flux = -nu * grad - t.I1 - t.I2;
  li.du_dt_flux_block = -nu * ws1(middle.u.field()) - t.I1 - t.I2;
  li.db_dt_flux = -t.I3 - t.I4;
  li.residual_u = std::abs(li.du_dt_fd - li.du_dt_flux);
  li.residual_b = std::abs(li.db_dt_fd - li.db_dt_flux);
  return li;
}

// ---------------------------------------------------------------------------

CalibrationResult calibrate_constants(const std::vector<MhdState>& ensemble, double nu, double s,
                                      const LittlewoodPaley& lp, double C_sto, double R_bb, double R_uu) {
  if (ensemble.empty()) throw ParameterError("calibrate_constants: empty ensemble");
  const double r = s + 1.0;
  const BlockWeights ws(lp, s), wr(lp, r);
  struct Measured {
    FluxTotals t;
    double u_s, b_r, b_s, A, grad_s2, grad_s1, dissip;
  };
  std::vector<Measured> rows(ensemble.size());
  parallel_for(ensemble.size(), [&](std::size_t i) {
    const MhdState& st = ensemble[i];
    Measured& m = rows[i];
    m.t = flux_totals(st, s, r, lp);
    const SpectralField grad = gradient(st.u.field());
    m.u_s = std::sqrt(ws(st.u.field()));
    m.b_r = std::sqrt(wr(st.b.field()));
    m.b_s = std::sqrt(ws(st.b.field()));
    m.A = m.u_s * m.u_s + m.b_r * m.b_r;
    const double gs = sobolev_norm_direct(grad, s, false);
    m.grad_s2 = gs * gs;
    m.grad_s1 = sobolev_norm_direct(grad, s + 1.0, false);
    m.dissip = ws(grad);
  });
  CalibrationNeeds needs;
  for (const Measured& m : rows) {
    const double bb = m.grad_s1 * m.b_r * m.b_r;
    if (bb > 0.0) {
      needs.est_i3 = std::max(needs.est_i3, std::abs(m.t.I3) / bb);
      needs.est_i4 = std::max(needs.est_i4, std::abs(m.t.I4) / bb);
    }
  }
  CalibrationResult res;
  res.samples = static_cast<int>(ensemble.size());
  res.C_0 = 1.1 * std::max(needs.est_i3, needs.est_i4);

  for (const Measured& m : rows) {
    auto bump = [](double& slot, double excess, double denom) {
      if (denom > 0.0) slot = std::max(slot, std::max(0.0, excess) / denom);
    };
    bump(needs.est_i1, m.t.I1 - nu / 8.0 * m.grad_s2, 2.0 * std::pow(m.u_s, 3.0));
    bump(needs.est_i2, std::abs(m.t.I2) - 3.0 * nu / 16.0 * m.grad_s2, std::pow(m.b_r, 4.0) + std::pow(m.b_s, 3.0));
    const double du2 = -2.0 * nu * m.dissip - 2.0 * (m.t.I1 + m.t.I2);
    bump(needs.energy2, du2 + nu * m.grad_s2,
         2.0 * std::pow(m.u_s, 3.0) + std::pow(m.b_r, 3.0) + std::pow(m.b_r, 4.0));
    const double dA = du2 - 2.0 * (m.t.I3 + m.t.I4);
    bump(needs.energy4, dA + 0.5 * nu * m.grad_s2 - res.C_0 * m.grad_s1 * m.A, 2.0 * m.A * m.A);
  }
  needs.l1 = C_sto / nu * std::max({1.0, R_bb, R_uu});
  res.needs = needs;
  res.C_nu = 1.1 * std::max({needs.est_i1, needs.est_i2, needs.energy2, needs.energy4});
  return res;
}

MhdState rough_state(const Grid& grid, double s, double u_norm, double b_norm, std::uint64_t seed, double margin,
                     double t) {
  Rng rng(seed);
  RandomFieldOptions opts;
  opts.components = grid.dimension();
  opts.modulus = Modulus::kUnit;
  const double half = 0.5 * grid.dimension();
  auto make = [&](double sigma, double reg, double norm) {
    SpectralField f =
        std::move(leray_project(random_field(grid, [sigma](double k) { return std::pow(k, -sigma); }, rng, opts)))
            .release();
    const double cur = sobolev_norm_direct(f, reg, false);
    if (cur > 0.0) f *= norm / cur;
    return SolenoidalField::trusted(std::move(f));
  };
  SolenoidalField u = make(s + half + margin, s, u_norm);
  SolenoidalField b = make(s + 1.0 + half + margin, s + 1.0, b_norm);
  return {std::move(u), std::move(b), t};
}

std::vector<MhdState> calibration_ensemble(const Grid& grid, double s, int samples, std::uint64_t seed, double t) {
  if (samples < 1) throw ParameterError("calibration ensemble: need at least one state");
  std::vector<MhdState> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int m = 0; m < samples; ++m) {
    const double frac = samples > 1 ? static_cast<double>(m) / (samples - 1) : 0.0;
    const double amp = 0.1 * std::pow(1000.0, frac);
    out.push_back(rough_state(grid, s, amp, amp, seed + static_cast<std::uint64_t>(m), 0.01 + 0.3 * (m % 10), t));
  }
  return out;
}

namespace {

SpectralField restrict_to(const SpectralField& f, const Grid& coarse) {
  SpectralField out(coarse, f.components());
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    if (!coarse.retained(i)) continue;
    const std::size_t j = f.grid().flat_index(coarse.wavevector(i));
    for (int c = 0; c < f.components(); ++c) out(c, i) = f(c, j);
  }
  return out;
}

MhdState restrict_state(const MhdState& st, const Grid& coarse) {
  return {SolenoidalField::trusted(restrict_to(st.u.field(), coarse)),
          SolenoidalField::trusted(restrict_to(st.b.field(), coarse)), st.t};
}

double weighted_sum(const std::vector<double>& w, const SpectralField& f) {
  double sum = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    auto comp = f.component(c);
    for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * std::norm(comp[i]);
  }
  return sum;
}

struct Segment {
  double max_A_ratio = 0.0;
  double T_achieved = 0.0;
  bool blew_up = false;
  double failure_time = 0.0;
  double dissipation_integral = 0.0;
  double l1_integral = 0.0;
  std::vector<TraceRow> trace;
};

Segment evolve_window(const MhdState& start, const PropagationConfig& cfg, double T_end, bool record) {
  const Grid& g = start.u.grid();
  const LittlewoodPaley lp(g, DyadicCutoff::build());
  const double s = cfg.s, r = s + 1.0;
  const BlockWeights ws(lp, s), wr(lp, r);
  std::vector<double> w_grad(g.size()), w_grad_s(g.size()), w_grad_s1(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double k2 = g.k2(i);
    w_grad[i] = k2;
    w_grad_s[i] = std::pow(1.0 + k2, s) * k2;
    w_grad_s1[i] = std::pow(1.0 + k2, s + 1.0) * k2;
  }
  const double A0 = ws(start.u.field()) + wr(start.b.field());

  SolverParams params;
  params.nu = cfg.nu;
  params.s = s;
  params.dt = 1.0;
  // Step below CFL 1/4 (room for the velocity to double) with at least 20 steps per window.
  const double speed = cfl_number(start, params);
  double dt = cfg.dt;
  if (speed > 0.0) dt = std::min(dt, 0.25 / speed);
  params.dt = std::min(dt, (T_end - start.t) / 20.0);

  Segment seg;
  double prev_t = start.t, prev_gs = 0.0, prev_gs1 = 0.0, prev_grad = 0.0, energy0 = 0.0, diss = 0.0;
  auto observe = [&](const MhdState& st, long k) {
    const double A = ws(st.u.field()) + wr(st.b.field());
    if (A0 > 0.0) seg.max_A_ratio = std::max(seg.max_A_ratio, A / A0);
    const double gs = weighted_sum(w_grad_s, st.u.field());
    const double gs1 = std::sqrt(weighted_sum(w_grad_s1, st.u.field()));
    const double grad = weighted_sum(w_grad, st.u.field());
    const double lu = l2_norm(st.u.field()), lb = l2_norm(st.b.field());
    const double energy = lu * lu + lb * lb;
    if (k == 0) {
      energy0 = energy;
    } else {
      const double h = st.t - prev_t;
      seg.dissipation_integral += 0.5 * h * (gs + prev_gs);
      seg.l1_integral += 0.5 * h * (gs1 + prev_gs1);
      diss += 0.5 * h * (grad + prev_grad);
    }
    prev_t = st.t;
    prev_gs = gs;
    prev_gs1 = gs1;
    prev_grad = grad;
    seg.T_achieved = st.t;
    if (record) {
      const FluxTotals f = flux_totals(st, s, r, lp);
      seg.trace.push_back({st.t, A, f.I1, f.I2, f.I3, f.I4, energy + 2.0 * cfg.nu * diss - energy0});
    }
  };
  const RunResult res = run(start, params, T_end, observe);
  seg.blew_up = res.blew_up;
  seg.failure_time = res.failure_time;
  return seg;
}

}  // namespace

PropagationReport propagation_experiment(const PropagationConfig& cfg, double C_nu, double C_0) {
  if (cfg.resolution_check && cfg.N < 32) throw ParameterError("propagation: the resolution check needs N >= 32");
  if (!(cfg.dt > 0.0)) throw ParameterError("propagation: dt must be positive");
  if (!(cfg.min_window >= 0.0)) throw ParameterError("propagation: min_window must be nonnegative");
  require_admissible(cfg.n, cfg.s, cfg.s + 1.0);
  const Grid grid(cfg.n, cfg.N);
  const LittlewoodPaley lp(grid, DyadicCutoff::build());
  const MhdState start = rough_state(grid, cfg.s, cfg.u_norm, cfg.b_norm, cfg.seed, cfg.margin, cfg.t0);

  PropagationReport rep;
  const double A0 = A_of_t(start, cfg.s, lp);
  const double lu = l2_norm(start.u.field()), lb = l2_norm(start.b.field());
  rep.u0_Hs = sobolev_norm_direct(start.u.field(), cfg.s, false);
  rep.constants = PropagationConstants::build(cfg.n, cfg.s, cfg.nu, cfg.t0, A0, lu * lu + lb * lb, C_nu, C_0);
  rep.window = predicted_window(rep.constants, rep.u0_Hs, cfg.T_search, cfg.min_window);
  if (rep.window.empty) {
    rep.verdict = "EMPTY-WINDOW";
    return rep;
  }
  const double T = rep.window.T;
  const PropagationConstants& pc = rep.constants;
  rep.dissipation_bound = (pc.A0 + pc.M1 * (T - pc.t0)) / pc.nu;
  rep.l1_bound = rep.window.F;

  Segment fine = evolve_window(start, cfg, T, true);
  rep.T_achieved = fine.T_achieved;
  rep.max_A_ratio = fine.max_A_ratio;
  rep.blew_up = fine.blew_up;
  rep.failure_time = fine.failure_time;
  rep.dissipation_integral = fine.dissipation_integral;
  rep.l1_integral = fine.l1_integral;
  rep.trace = std::move(fine.trace);

  if (cfg.resolution_check) {
    const Grid coarse(cfg.n, cfg.N / 2);
    const Segment c = evolve_window(restrict_state(start, coarse), cfg, T, false);
    rep.coarse_max_A_ratio = c.max_A_ratio;
    rep.resolution_change = rep.max_A_ratio > 0.0 ? std::abs(c.max_A_ratio - rep.max_A_ratio) / rep.max_A_ratio : 0.0;
    rep.converged = rep.resolution_change < 0.05;
  }
  rep.verdict = (!rep.blew_up && rep.max_A_ratio <= 4.0) ? "PASS" : "FAIL";
  return rep;
}

}  // namespace lpmhd
