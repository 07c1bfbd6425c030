#include <doctest.h>

#include <cmath>

#include "lpmhd/error.hpp"
#include "lpmhd/littlewood_paley.hpp"
#include "lpmhd/operators.hpp"
#include "lpmhd/random_fields.hpp"
#include "oracles.hpp"

using namespace lpmhd;

TEST_CASE("cutoff profile matches the reference bump") {
  const DyadicCutoff cut = DyadicCutoff::build();
  for (double r = 0.0; r <= 4.5; r += 0.013) {
    CHECK(cut.chi(r) == doctest::Approx(oracle::chi(r)).epsilon(1e-15));
    CHECK(cut.phi(r) == doctest::Approx(oracle::phi(r)).epsilon(1e-15));
  }
  CHECK(cut.chi(0.75) == 1.0);
  CHECK(cut.chi(1.0) == 0.0);
  CHECK(cut.phi(0.7) == 0.0);
  CHECK(cut.phi(2.0) == 0.0);
  CHECK(cut.block_symbol(-1, 0.5) == 1.0);
  CHECK(cut.block_symbol(3, 12.0) == doctest::Approx(oracle::phi(1.5)));
}

TEST_CASE("partition of unity on the real line") {
  for (const char* profile : {"exp-bump", "smoothstep7"}) {
    const DyadicCutoff cut = DyadicCutoff::build(profile);
    for (double r = 0.0; r < 200.0; r += 0.0917) {
      double sum = cut.chi(r);
      for (int q = 0; q < 10; ++q) sum += cut.phi(std::ldexp(r, -q));
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
      // At most three blocks overlap any radius.
      int active = cut.chi(r) > 0.0;
      for (int q = 0; q < 10; ++q) active += cut.phi(std::ldexp(r, -q)) > 0.0;
      CHECK(active <= 3);
    }
  }
}

TEST_CASE("custom steps are validated") {
  CHECK_NOTHROW(DyadicCutoff::from_step("linear", [](double t) { return t; }));
  CHECK_THROWS_AS(DyadicCutoff::from_step("bad-end", [](double t) { return 0.5 * t; }), ParameterError);
  CHECK_THROWS_AS(DyadicCutoff::from_step("wiggle", [](double t) { return t + 0.3 * std::sin(6 * M_PI * t); }),
                  ParameterError);
  CHECK_THROWS_AS(DyadicCutoff::build("no-such-profile"), ParameterError);
}

TEST_CASE("blocks sum back to the field") {
  for (int n : {2, 3}) {
    const Grid g(n, n == 2 ? 64 : 16);
    const LittlewoodPaley lp(g, DyadicCutoff::build());
    Rng rng(11);
    RandomFieldOptions opts;
    opts.components = 2;
    opts.zero_mean = false;
    const SpectralField u = random_field(g, power_law_envelope(0.5), rng, opts);
    const LPBlocks blocks = lp.decompose(u);
    CHECK(oracle::rel_diff(blocks.reconstruct(), u) < 1e-14);
    CHECK(oracle::rel_diff(blocks.low_pass(blocks.q_max()), u) < 1e-14);
    for (int q = -1; q <= lp.q_max(); ++q) {
      CHECK(blocks.block(q).hermitian_defect() < 1e-15);
      CHECK(oracle::rel_diff(blocks.low_pass(q), lp.low_pass(u, q)) < 1e-14);
    }
    // Δ_{−1} on the lattice keeps only the mean.
    const SpectralField& m = blocks.block(-1);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(std::abs(m(0, i)) == 0.0);
    CHECK(m(0, 0) == u(0, 0));
    CHECK(oracle::rel_diff(blocks.band(0, 3), lp.low_pass(u, 3) - lp.low_pass(u, 0)) < 1e-14);
    CHECK(oracle::l2(lp.block(u, lp.q_max() + 1)) == 0.0);
  }
}

TEST_CASE("symbols follow the reference cutoff") {
  const Grid g(2, 64);
  const LittlewoodPaley lp(g, DyadicCutoff::build());
  for (std::size_t i = 0; i < g.size(); i += 13) {
    if (g.nyquist(i)) {
      for (int q = -1; q <= lp.q_max(); ++q) CHECK(lp.symbol(q, i) == 0.0);
      continue;
    }
    const double r = g.kabs(i);
    CHECK(lp.symbol(-1, i) == doctest::Approx(oracle::chi(r)).epsilon(1e-15));
    for (int q = 0; q <= lp.q_max(); ++q) {
      CHECK(lp.symbol(q, i) == doctest::Approx(oracle::phi(std::ldexp(r, -q))).epsilon(1e-15));
    }
  }
  CHECK(lp.q_max() == max_shell(g));
}

TEST_CASE("block norm of a single mode") {
  const Grid g(2, 64);
  const LittlewoodPaley lp(g, DyadicCutoff::build());
  SpectralField f(g, 1);
  oracle::add_mode(f, 0, {5, 0, 0}, Complex(1.0, 0.0));
  const LPBlocks b = lp.decompose(f);
  double expect = 0.0;
  for (int q = 0; q <= lp.q_max(); ++q) {
    const double w = oracle::phi(std::ldexp(5.0, -q));
    expect += std::pow(2.0, 2 * 1.5 * q) * 2.0 * w * w;
  }
  CHECK(block_sobolev_norm(b, 1.5) == doctest::Approx(std::sqrt(expect)).epsilon(1e-13));
  // Shell 2 (radius 5 = 1.25·4) carries the full mode at s = 0.
  CHECK(besov_norm(b, 0.0, 2.0) == doctest::Approx(std::sqrt(2.0) * oracle::phi(1.25)).epsilon(1e-13));
}

TEST_CASE("block and direct Sobolev norms are comparable") {
  const Grid g(2, 64);
  const LittlewoodPaley lp(g, DyadicCutoff::build());
  const EquivalenceScan scan = norm_equivalence_scan(lp, 40, {-1.0, 0.5, 1.5, 3.0}, 3);
  CHECK(scan.samples == 40);
  CHECK(scan.c1 > 0.0);
  CHECK(scan.c1 <= scan.c2);
  CHECK(scan.c2 / scan.c1 < 6.0);
  for (std::size_t j = 0; j < scan.s_values.size(); ++j) CHECK(scan.min_by_s[j] <= scan.max_by_s[j]);
}

TEST_CASE("Bernstein ratio of a band-limited field") {
  const Grid g(2, 64);
  const LittlewoodPaley lp(g, DyadicCutoff::build());
  Rng rng(2);
  RandomFieldOptions opts;
  const SpectralField u = random_field(g, power_law_envelope(0.0), rng, opts);
  const SpectralField u3 = lp.block(u, 3);
  const double r = bernstein_ratio(u3, 3, INFINITY, 2.0);
  CHECK(r > 0.0);
  CHECK(r < 3.0);
  CHECK(bernstein_ratio(u3, 3, 2.0, 2.0) == doctest::Approx(1.0));
  CHECK(bernstein_ratio(SpectralField(g, 1), 3, 4.0, 2.0) == 0.0);
  CHECK_THROWS_AS(bernstein_ratio(u3, 3, 1.5, 2.0), ParameterError);

  const BernsteinScan scan = bernstein_scan(lp, 20, INFINITY, 2.0, 7);
  CHECK(!scan.shells.empty());
  CHECK(scan.constant == doctest::Approx(*std::max_element(scan.max_ratio.begin(), scan.max_ratio.end())));
  CHECK(scan.spread < 0.2);
}

TEST_CASE("lp norms of a cosine") {
  const Grid g(2, 32);
  SpectralField f(g, 1);
  oracle::add_mode(f, 0, {0, 2, 0}, Complex(0.5, 0.0));
  CHECK(block_lp_norm(f, 2.0) == doctest::Approx(std::sqrt(0.5)));
  CHECK(block_lp_norm(f, INFINITY) == doctest::Approx(1.0));
  // mean |cos|^4 = 3/8
  CHECK(block_lp_norm(f, 4.0) == doctest::Approx(std::pow(3.0 / 8.0, 0.25)).epsilon(1e-10));
}
