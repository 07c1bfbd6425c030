#include "lpmhd/paraproduct.hpp"

#include <algorithm>
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

constexpr double kDegenerateNumerator = 1e-13;

void require_shell(const LittlewoodPaley& lp, int q, const char* where) {
  if (q < -1 || q > lp.q_max()) {
    std::ostringstream msg;
    msg << where << ": shell index " << q << " outside [-1, " << lp.q_max() << "]";
    throw ParameterError(msg.str());
  }
}

}  // namespace

SpectralField BonySplit::sum() const {
  SpectralField out = low_high;
  out += high_low;
  out += high_high;
  return out;
}

BonySplit bony_split(const LittlewoodPaley& lp, const SolenoidalField& u, const SpectralField& v, int q) {
  require_same_grid(lp.grid(), u.grid(), "bony_split");
  require_same_grid(lp.grid(), v.grid(), "bony_split");
  require_shell(lp, q, "bony_split");
  const int top = lp.q_max();
  const SpectralField& uf = u.field();
  BonySplit split{SpectralField(lp.grid(), v.components()), SpectralField(lp.grid(), v.components()),
                  SpectralField(lp.grid(), v.components()), q};

  for (int p = std::max(-1, q - 2); p <= std::min(top, q + 2); ++p) {
    if (p - 2 < -1) continue;
    split.low_high += lp.block(transport(lp.low_pass(uf, p - 2), lp.block(v, p)), q);
    split.high_low += lp.block(transport(lp.block(uf, p), lp.low_pass(v, p - 2)), q);
  }
  for (int p = std::max(-1, q - 2); p <= top; ++p) {
    split.high_high += lp.block(transport(lp.tilde_block(uf, p), lp.block(v, p)), q);
  }
  return split;
}

SpectralField commutator(const LittlewoodPaley& lp, int q, int p, const SolenoidalField& u, const SpectralField& v) {
  require_same_grid(lp.grid(), u.grid(), "commutator");
  require_same_grid(lp.grid(), v.grid(), "commutator");
  const SpectralField low = lp.low_pass(u.field(), p - 2);
  const SpectralField vp = lp.block(v, p);
  SpectralField out = lp.block(transport(low, vp), q);
  out -= transport(low, lp.block(vp, q));
  return out;
}

double commutator_bound_ratio(const LittlewoodPaley& lp, int q, int p, const SolenoidalField& u,
                              const SpectralField& v, double r) {
  if (!(r > 1.0) || std::isinf(r)) throw ParameterError("commutator_bound_ratio: exponent must lie in (1, inf)");
  const double num = block_lp_norm(commutator(lp, q, p, u, v), r);
  const SpectralField low = lp.low_pass(u.field(), p - 2);
  const double den = lp_norm(gradient(low), std::numeric_limits<double>::infinity(), 2) *
                     block_lp_norm(lp.block(v, p), r);
  if (den == 0.0) {
    if (num < kDegenerateNumerator) return 0.0;
    std::ostringstream msg;
    msg << "commutator_bound_ratio: zero denominator with numerator " << num << " at (q, p) = (" << q << ", " << p
        << ")";
    throw DegenerateRatioError(msg.str());
  }
  return num / den;
}

namespace {

SolenoidalField few_mode_field(const Grid& g, int modes, double r_lo, double r_hi, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = g.dimension();
  r_lo = std::max(r_lo, 1.0);
  r_hi = std::max(r_hi, r_lo);
  SpectralField f(g, n);
  for (int m = 0; m < modes; ++m) {
    Wavevector k{};
    double kn = 0.0;
    do {
      const double rad = r_lo + (r_hi - r_lo) * unit(rng);
      double dir[3] = {gauss(rng), gauss(rng), n == 3 ? gauss(rng) : 0.0};
      const double len = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
      kn = 0.0;
      for (int d = 0; d < n; ++d) {
        k[d] = static_cast<int>(std::lround(rad * dir[d] / len));
        kn += static_cast<double>(k[d]) * k[d];
      }
    } while (kn == 0.0);
    const std::size_t i = g.flat_index(k);
    const std::size_t j = g.conjugate_index(i);
    const double amp = (0.5 + 0.5 * unit(rng)) / std::sqrt(kn);
    for (int c = 0; c < n; ++c) {
      const Complex z = std::polar(amp * gauss(rng), 2.0 * std::numbers::pi * unit(rng));
      f(c, i) += z;
      f(c, j) += std::conj(z);
    }
  }
  return leray_project(f);
}

}  // namespace

int max_commutator_shell(const Grid& grid) {
  const double box = grid.dealias_cutoff();
  int q = 2;
  while (1.05 * std::ldexp(1.0, q + 2) + 2.0 * std::max(1.0, 0.08 * std::ldexp(1.0, q + 1)) <= box) ++q;
  return q;
}

double commutator_pair_max(const LittlewoodPaley& lp, int q, int p, int samples, double r, Rng& rng, int modes) {
  const Grid& g = lp.grid();
  const double hi = std::ldexp(1.0, p - 2);
  RandomFieldOptions opts;
  double best = 0.0;
  std::uniform_real_distribution<double> radius(0.7, 1.05);
  std::bernoulli_distribution upper_edge(0.5);
  const double lam = std::ldexp(1.0, q);
  const double width = std::max(1.0, 0.08 * lam);
  for (int m = 0; m < samples; ++m) {
    const SolenoidalField u = few_mode_field(g, modes, 0.25 * hi, hi, rng);
    const double ring = radius(rng) * lam * (upper_edge(rng) ? 2.0 : 1.0);
    const SpectralField v = random_field(
        g, [ring, width](double k) { return std::exp(-(k - ring) * (k - ring) / (width * width)); }, rng, opts);
    best = std::max(best, commutator_bound_ratio(lp, q, p, u, v, r));
  }
  return best;
}

CommutatorScan commutator_scan(const LittlewoodPaley& lp, int samples_per_shell, double r, std::uint64_t seed,
                               int modes) {
  const int top = std::min(lp.q_max() - 1, max_commutator_shell(lp.grid()));
  if (top < 3) throw ParameterError("commutator_scan: grid too coarse");
  if (samples_per_shell < 3 || modes < 1) throw ParameterError("commutator_scan: ensemble too small");
  Rng rng(seed);
  CommutatorScan scan;
  scan.r = r;
  scan.samples_per_shell = samples_per_shell;
  for (int q = 3; q <= top; ++q) {
    double best = 0.0;
    for (int d = -1; d <= 1; ++d) {
      const int count = samples_per_shell / 3 + (d + 1 < samples_per_shell % 3 ? 1 : 0);
      best = std::max(best, commutator_pair_max(lp, q, q + d, count, r, rng, modes));
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
