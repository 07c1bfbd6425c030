#include "lpmhd/littlewood_paley.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "lpmhd/error.hpp"
#include "lpmhd/operators.hpp"
#include "lpmhd/random_fields.hpp"

namespace lpmhd {

namespace {

double bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double exp_bump_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = bump(t);
  const double b = bump(1.0 - t);
  return a / (a + b);
}

double smoothstep7(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double t4 = t * t * t * t;
  return t4 * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)));
}

}  // namespace

DyadicCutoff DyadicCutoff::build(const std::string& profile) {
  if (profile == "exp-bump") return from_step(profile, exp_bump_step);
  if (profile == "smoothstep7") return from_step(profile, smoothstep7);
  throw ParameterError("unknown cutoff profile '" + profile + "'");
}

DyadicCutoff DyadicCutoff::from_step(std::string name, Step step) {
  if (!step) throw ParameterError("cutoff step function is empty");
  if (step(0.0) != 0.0 || step(1.0) != 1.0) {
    throw ParameterError("cutoff step must satisfy S(0) = 0 and S(1) = 1 exactly");
  }
  constexpr int kSamples = 2000;
  double prev = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double v = step(static_cast<double>(i) / kSamples);
    if (!(v >= 0.0 && v <= 1.0)) throw ParameterError("cutoff step leaves [0, 1]");
    if (v < prev) throw ParameterError("cutoff step is not monotone");
    prev = v;
  }
  return DyadicCutoff(std::move(name), std::move(step));
}

double DyadicCutoff::chi(double r) const {
  if (r <= 0.75) return 1.0;
  if (r >= 1.0) return 0.0;
  return 1.0 - step_(4.0 * (r - 0.75));
}

double DyadicCutoff::block_symbol(int q, double r) const {
  if (q < -1) return 0.0;
  if (q == -1) return chi(r);
  return phi(std::ldexp(r, -q));
}

int max_shell(const Grid& grid) {
  const double kmax = grid.max_wavenumber();
  int q = -1;
  while (0.75 * std::ldexp(1.0, q + 1) < kmax) ++q;
  return q;
}

// ---------------------------------------------------------------------------

const SpectralField& LPBlocks::block(int q) const {
  require_index(q, "LPBlocks::block");
  return blocks_[static_cast<std::size_t>(q + 1)];
}

void LPBlocks::require_index(int q, const char* where) const {
  if (q < -1 || q > q_max()) {
    std::ostringstream msg;
    msg << where << ": shell index " << q << " outside [-1, " << q_max() << "]";
    throw ParameterError(msg.str());
  }
}

SpectralField LPBlocks::low_pass(int Q) const {
  require_index(Q, "LPBlocks::low_pass");
  SpectralField out = blocks_.front();
  for (int q = 0; q <= Q; ++q) out += block(q);
  return out;
}

SpectralField LPBlocks::band(int Q, int M) const {
  require_index(Q, "LPBlocks::band");
  require_index(M, "LPBlocks::band");
  if (M < Q) throw ParameterError("LPBlocks::band: upper index below lower index");
  SpectralField out(grid(), blocks_.front().components());
  for (int p = Q + 1; p <= M; ++p) out += block(p);
  return out;
}

SpectralField LPBlocks::tilde_block(int q) const {
  require_index(q, "LPBlocks::tilde_block");
  SpectralField out(grid(), blocks_.front().components());
  for (int p = std::max(-1, q - 1); p <= std::min(q_max(), q + 1); ++p) out += block(p);
  return out;
}

SpectralField LPBlocks::reconstruct() const { return low_pass(q_max()); }

// ---------------------------------------------------------------------------

LittlewoodPaley::LittlewoodPaley(Grid grid, DyadicCutoff cutoff)
    : grid_(std::move(grid)), cutoff_(std::move(cutoff)), q_max_(max_shell(grid_)) {
  symbols_.resize(static_cast<std::size_t>(q_max_ + 2));
  for (int q = -1; q <= q_max_; ++q) {
    auto& sym = symbols_[static_cast<std::size_t>(q + 1)];
    sym.resize(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      sym[i] = grid_.nyquist(i) ? 0.0 : cutoff_.block_symbol(q, grid_.kabs(i));
    }
  }
}

double LittlewoodPaley::symbol(int q, std::size_t i) const {
  if (q < -1 || q > q_max_) return 0.0;
  return symbols_[static_cast<std::size_t>(q + 1)][i];
}

SpectralField LittlewoodPaley::block(const SpectralField& u, int q) const {
  require_same_grid(grid_, u.grid(), "LittlewoodPaley::block");
  SpectralField out(grid_, u.components());
  if (q < -1 || q > q_max_) return out;
  const auto& sym = symbols_[static_cast<std::size_t>(q + 1)];
  for (int c = 0; c < u.components(); ++c) {
    auto src = u.component(c);
    auto dst = out.component(c);
    for (std::size_t i = 0; i < grid_.size(); ++i) dst[i] = sym[i] * src[i];
  }
  return out;
}

SpectralField LittlewoodPaley::low_pass(const SpectralField& u, int Q) const {
  require_same_grid(grid_, u.grid(), "LittlewoodPaley::low_pass");
  SpectralField out(grid_, u.components());
  const int top = std::min(Q, q_max_);
  if (top < -1) return out;
  std::vector<double> sym(grid_.size(), 0.0);
  for (int q = -1; q <= top; ++q) {
    const auto& s = symbols_[static_cast<std::size_t>(q + 1)];
    for (std::size_t i = 0; i < sym.size(); ++i) sym[i] += s[i];
  }
  for (int c = 0; c < u.components(); ++c) {
    auto src = u.component(c);
    auto dst = out.component(c);
    for (std::size_t i = 0; i < grid_.size(); ++i) dst[i] = sym[i] * src[i];
  }
  return out;
}

SpectralField LittlewoodPaley::tilde_block(const SpectralField& u, int q) const {
  SpectralField out(grid_, u.components());
  for (int p = q - 1; p <= q + 1; ++p) out += block(u, p);
  return out;
}

LPBlocks LittlewoodPaley::decompose(const SpectralField& u) const {
  std::vector<SpectralField> blocks;
  blocks.reserve(static_cast<std::size_t>(q_max_ + 2));
  for (int q = -1; q <= q_max_; ++q) blocks.push_back(block(u, q));
  return LPBlocks(std::move(blocks));
}

// ---------------------------------------------------------------------------

double block_lp_norm(const SpectralField& u, double p) {
  if (p == 2.0) return l2_norm(u);
  if (std::isinf(p)) return linf_norm(u);
  return lp_norm(u, p, 2);
}

double block_sobolev_norm(const LPBlocks& blocks, double s) {
  double sum = 0.0;
  for (int q = -1; q <= blocks.q_max(); ++q) {
    const double n2 = inner_product(blocks.block(q), blocks.block(q));
    sum += std::pow(dyadic_scale(q), 2.0 * s) * n2;
  }
  return std::sqrt(sum);
}

double besov_norm(const LPBlocks& blocks, double s, double p) {
  if (!(p >= 1.0)) throw ParameterError("besov_norm: exponent must lie in [1, inf]");
  double sup = 0.0;
  for (int q = -1; q <= blocks.q_max(); ++q) {
    sup = std::max(sup, std::pow(dyadic_scale(q), s) * block_lp_norm(blocks.block(q), p));
  }
  return sup;
}

double bernstein_ratio(const SpectralField& u_q, int q, double r, double s) {
  if (!(s >= 1.0)) throw ParameterError("bernstein_ratio: requires s >= 1");
  if (!(r >= s)) throw ParameterError("bernstein_ratio: requires r >= s");
  const double inv_r = std::isinf(r) ? 0.0 : 1.0 / r;
  const double inv_s = std::isinf(s) ? 0.0 : 1.0 / s;
  const double n = u_q.grid().dimension();
  const double num = block_lp_norm(u_q, r);
  const double den = block_lp_norm(u_q, s);
  if (den == 0.0) return 0.0;
  if (r == s) return 1.0;
  return num / (std::pow(dyadic_scale(q), n * (inv_s - inv_r)) * den);
}

// ---------------------------------------------------------------------------

EquivalenceScan norm_equivalence_scan(const LittlewoodPaley& lp, int samples, const std::vector<double>& s_values,
                                      std::uint64_t seed) {
  if (samples < 1 || s_values.empty()) throw ParameterError("norm_equivalence_scan: empty ensemble");
  Rng rng(seed);
  std::uniform_real_distribution<double> slope(0.5, 3.0);
  EquivalenceScan scan;
  scan.samples = samples;
  scan.s_values = s_values;
  scan.min_by_s.assign(s_values.size(), std::numeric_limits<double>::infinity());
  scan.max_by_s.assign(s_values.size(), 0.0);
  RandomFieldOptions opts;
  opts.dealiased = false;
  for (int m = 0; m < samples; ++m) {
    const SpectralField u = random_field(lp.grid(), power_law_envelope(slope(rng)), rng, opts);
    const LPBlocks blocks = lp.decompose(u);
    for (std::size_t j = 0; j < s_values.size(); ++j) {
      const double ratio = block_sobolev_norm(blocks, s_values[j]) / sobolev_norm_direct(u, s_values[j], true);
      scan.min_by_s[j] = std::min(scan.min_by_s[j], ratio);
      scan.max_by_s[j] = std::max(scan.max_by_s[j], ratio);
    }
  }
  scan.c1 = *std::min_element(scan.min_by_s.begin(), scan.min_by_s.end());
  scan.c2 = *std::max_element(scan.max_by_s.begin(), scan.max_by_s.end());
  return scan;
}

int max_resolved_shell(const Grid& grid) {
  int q = -1;
  while (std::ldexp(1.0, q + 2) <= grid.points() / 2 - 1) ++q;
  return q;
}

BernsteinScan bernstein_scan(const LittlewoodPaley& lp, int samples_per_shell, double r, double s,
                             std::uint64_t seed) {
  if (samples_per_shell < 2) throw ParameterError("bernstein_scan: need at least two samples per shell");
  const Grid& g = lp.grid();
  const int top = std::min(max_resolved_shell(g), lp.q_max());
  if (top < 2) throw ParameterError("bernstein_scan: grid resolves no shell above q = 1");
  Rng rng(seed);
  std::uniform_int_distribution<int> point(0, g.points() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  BernsteinScan scan;
  scan.r = r;
  scan.s = s;
  scan.samples_per_shell = samples_per_shell;
  for (int q = 2; q <= top; ++q) {
    double best = 0.0;
    for (int m = 0; m < samples_per_shell; ++m) {
      const double rho = static_cast<double>(m) / (samples_per_shell - 1);
      std::array<int, 3> x0{};
      for (int d = 0; d < g.dimension(); ++d) x0[d] = point(rng);
      SpectralField f(g, 1);
      auto comp = f.component(0);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const std::size_t j = g.conjugate_index(i);
        if (j < i || g.nyquist(i) || lp.symbol(q, i) == 0.0) continue;
        const Wavevector& k = g.wavevector(i);
        double kx = 0.0;
        for (int d = 0; d < g.dimension(); ++d) kx += k[d] * x0[d];
        kx *= 2.0 * std::numbers::pi / g.points();
        const double amp = 1.0 - 0.5 * rho * unit(rng);
        const double psi = rho * std::numbers::pi * (2.0 * unit(rng) - 1.0);
        Complex z = std::polar(amp * lp.symbol(q, i), psi - kx);
        if (j == i) z = Complex(z.real(), 0.0);
        comp[i] = z;
        comp[j] = std::conj(z);
      }
      best = std::max(best, bernstein_ratio(f, q, r, s));
    }
    scan.shells.push_back(q);
    scan.max_ratio.push_back(best);
  }
  const auto [lo, hi] = std::minmax_element(scan.max_ratio.begin(), scan.max_ratio.end());
  const double mean = std::accumulate(scan.max_ratio.begin(), scan.max_ratio.end(), 0.0) / scan.max_ratio.size();
  scan.constant = *hi;
  scan.spread = (*hi - *lo) / mean;
  return scan;
}

}  // namespace lpmhd
