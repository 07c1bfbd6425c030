#include <doctest.h>

#include <cmath>

#include "lpmhd/error.hpp"
#include "lpmhd/operators.hpp"
#include "lpmhd/paraproduct.hpp"
#include "oracles.hpp"

using namespace lpmhd;

namespace {

SpectralField multiply_symbol(const LittlewoodPaley& lp, int q, const SpectralField& f) {
  // Δ_q applied through the reference cutoff, not the cached bank.
  const Grid& g = f.grid();
  SpectralField out = f;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double m = 0.0;
    if (!g.nyquist(i)) m = q < 0 ? oracle::chi(g.kabs(i)) : oracle::phi(std::ldexp(g.kabs(i), -q));
    for (int c = 0; c < f.components(); ++c) out(c, i) *= m;
  }
  (void)lp;
  return out;
}

SpectralField low_pass_ref(const SpectralField& f, int Q) {
  const Grid& g = f.grid();
  SpectralField out = f;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double m = (Q < -1 || g.nyquist(i)) ? 0.0 : oracle::chi(std::ldexp(g.kabs(i), -(Q + 1)));
    for (int c = 0; c < f.components(); ++c) out(c, i) *= m;
  }
  return out;
}

struct Pair {
  SolenoidalField u;
  SpectralField v;
};

Pair random_pair(const Grid& g, std::uint64_t seed, double slope = 1.0) {
  Rng rng(seed);
  RandomFieldOptions opts;
  opts.components = g.dimension();
  opts.zero_mean = false;
  SpectralField raw = random_field(g, power_law_envelope(slope), rng, opts);
  SolenoidalField u = leray_project(raw);
  return {std::move(u), random_field(g, power_law_envelope(slope), rng, opts)};
}

}  // namespace

TEST_CASE("Bony pieces add up to the block of the product") {
  const Grid g(2, 64);
  const LittlewoodPaley lp(g, DyadicCutoff::build());
  const Pair pr = random_pair(g, 21);
  const SpectralField full = advect(pr.u, pr.v);
  SpectralField total(g, 2);
  for (int q = -1; q <= lp.q_max(); ++q) {
    const BonySplit split = bony_split(lp, pr.u, pr.v, q);
    CHECK(split.q == q);
    const SpectralField target = lp.block(full, q);
    CHECK(oracle::l2(split.sum() - target) <= 1e-12 * oracle::l2(full));
    total += split.sum();
  }
  CHECK(oracle::rel_diff(total, full) < 1e-12);
  CHECK_THROWS_AS(bony_split(lp, pr.u, pr.v, lp.q_max() + 1), ParameterError);
  CHECK_THROWS_AS(bony_split(lp, pr.u, pr.v, -2), ParameterError);
}

TEST_CASE("Bony split with a vanishing factor") {
  const Grid g(2, 32);
  const LittlewoodPaley lp(g, DyadicCutoff::build());
  const Pair pr = random_pair(g, 22);
  const SolenoidalField zero_u = SolenoidalField::trusted(SpectralField(g, 2));
  const BonySplit a = bony_split(lp, zero_u, pr.v, 2);
  CHECK(oracle::l2(a.sum()) == 0.0);
  const BonySplit b = bony_split(lp, pr.u, SpectralField(g, 2), 2);
  CHECK(oracle::l2(b.low_high) == 0.0);
  CHECK(oracle::l2(b.high_low) == 0.0);
  CHECK(oracle::l2(b.high_high) == 0.0);
}

TEST_CASE("commutator equals the explicit convolution") {
  const Grid g(2, 32);
  const LittlewoodPaley lp(g, DyadicCutoff::build());
  const Pair pr = random_pair(g, 23);
  for (int q = 0; q <= 3; ++q) {
    for (int p = q - 1; p <= q + 1; ++p) {
      if (p < 0) continue;
      const SpectralField low = low_pass_ref(pr.u.field(), p - 2);
      const SpectralField vp = multiply_symbol(lp, p, pr.v);
      const SpectralField ref = multiply_symbol(lp, q, oracle::convolution_transport(low, vp)) -
                                oracle::convolution_transport(low, multiply_symbol(lp, q, vp));
      const SpectralField got = commutator(lp, q, p, pr.u, pr.v);
      CHECK(oracle::l2(got - ref) <= 1e-12 * std::max(1.0, oracle::l2(ref)));
    }
  }
}

TEST_CASE("commutator with a constant drift vanishes") {
  const Grid g(2, 32);
  const LittlewoodPaley lp(g, DyadicCutoff::build());
  SpectralField c(g, 2);
  c(0, 0) = 0.7;
  c(1, 0) = -1.3;
  const SolenoidalField u = SolenoidalField::check(c);
  const Pair pr = random_pair(g, 24);
  for (int q = 0; q <= 3; ++q) CHECK(oracle::l2(commutator(lp, q, q, u, pr.v)) < 1e-14);
  CHECK(commutator_bound_ratio(lp, 2, 2, u, pr.v) == 0.0);
}

TEST_CASE("commutators over all blocks telescope to zero") {
  const Grid g(2, 32);
  const LittlewoodPaley lp(g, DyadicCutoff::build());
  const Pair pr = random_pair(g, 25);
  for (int p = 1; p <= lp.q_max(); ++p) {
    SpectralField sum(g, 2);
    for (int q = -1; q <= lp.q_max(); ++q) sum += commutator(lp, q, p, pr.u, pr.v);
    CHECK(oracle::l2(sum) < 1e-13 * std::max(1.0, oracle::l2(pr.v)));
  }
}

TEST_CASE("commutator ratio conventions") {
  const Grid g(2, 32);
  const LittlewoodPaley lp(g, DyadicCutoff::build());
  const Pair pr = random_pair(g, 26);
  CHECK_THROWS_AS(commutator_bound_ratio(lp, 2, 2, pr.u, pr.v, 1.0), ParameterError);
  CHECK_THROWS_AS(commutator_bound_ratio(lp, 2, 2, pr.u, pr.v, INFINITY), ParameterError);
  // p < 1: the low-pass of u is empty, numerator and denominator both vanish.
  CHECK(commutator_bound_ratio(lp, 0, 0, pr.u, pr.v) == 0.0);
  const double r = commutator_bound_ratio(lp, 3, 3, pr.u, pr.v);
  CHECK(r > 0.0);
  CHECK(std::isfinite(r));
}

TEST_CASE("commutator scan is bounded across shells") {
  const Grid g(2, 128);
  const LittlewoodPaley lp(g, DyadicCutoff::build());
  const CommutatorScan scan = commutator_scan(lp, 12, 2.0, 5);
  CHECK(scan.shells.front() == 3);
  CHECK(scan.max_ratio.size() == scan.shells.size());
  CHECK(scan.constant > 0.0);
  CHECK(scan.constant < 10.0);
  CHECK(scan.constant == doctest::Approx(*std::max_element(scan.max_ratio.begin(), scan.max_ratio.end())));
  CHECK_THROWS_AS(commutator_scan(LittlewoodPaley(Grid(2, 16), DyadicCutoff::build()), 12, 2.0, 5), ParameterError);
}
