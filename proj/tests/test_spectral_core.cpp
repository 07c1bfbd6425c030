#include <doctest.h>

#include <cmath>
#include <random>

#include "lpmhd/error.hpp"
#include "lpmhd/fft.hpp"
#include "lpmhd/operators.hpp"
#include "lpmhd/random_fields.hpp"
#include "oracles.hpp"

using namespace lpmhd;

TEST_CASE("grid tables") {
  const Grid g(2, 16);
  CHECK(g.size() == 256);
  CHECK(g.dealias_cutoff() == 5);
  int retained = 0, nyquist = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    retained += g.retained(i);
    nyquist += g.nyquist(i);
    const std::size_t j = g.conjugate_index(i);
    if (!g.nyquist(i)) {
      CHECK(g.wavevector(j)[0] == -g.wavevector(i)[0]);
      CHECK(g.wavevector(j)[1] == -g.wavevector(i)[1]);
    }
    CHECK(g.flat_index(g.wavevector(i)) == i);
    CHECK(g.k2(i) == doctest::Approx(g.kabs(i) * g.kabs(i)));
  }
  CHECK(retained == 11 * 11);
  CHECK(nyquist == 2 * 16 - 1);
  CHECK_THROWS_AS(Grid(4, 16), ParameterError);
  CHECK_THROWS_AS(Grid(2, 24), ParameterError);
  CHECK_THROWS_AS(Grid(2, 8), ParameterError);
  CHECK_THROWS_AS(require_same_grid(Grid(2, 32), Grid(2, 16), "t"), GridMismatchError);
}

TEST_CASE("forward transform matches the direct sum") {
  for (int n : {2, 3}) {
    const Grid g(n, 16);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    std::vector<double> u(g.size());
    for (double& x : u) x = nd(rng);
    const auto ref = oracle::naive_dft(g, u);
    const SpectralField f = to_spectral(g, PhysicalField{{u}});
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(f(0, i) - ref[i]));
    CHECK(err < 1e-14);
    const auto back = to_physical(f, 0);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(back[i] == doctest::Approx(u[i]).epsilon(1e-12));
  }
}

TEST_CASE("single mode evaluates to a cosine") {
  const Grid g(2, 16);
  SpectralField f(g, 1);
  oracle::add_mode(f, 0, {3, -2, 0}, Complex(0.5, 0.0));
  const auto u = to_physical(f, 0);
  for (std::size_t i = 0; i < g.size(); i += 7) {
    const auto x = oracle::position(g, i);
    CHECK(u[i] == doctest::Approx(std::cos(3 * x[0] - 2 * x[1])).epsilon(1e-12));
  }
  CHECK(l2_norm(f) == doctest::Approx(std::sqrt(0.5)));
  CHECK(linf_norm(f) == doctest::Approx(1.0));
  CHECK(lp_norm(f, 2.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
  CHECK(sobolev_norm_direct(f, 1.0, true) == doctest::Approx(std::sqrt(13.0 * 0.5)));
  CHECK(sobolev_norm_direct(f, 1.0, false) == doctest::Approx(std::sqrt(14.0 * 0.5)));
}

TEST_CASE("random fields are real and dealiased") {
  const Grid g(2, 32);
  Rng rng(9);
  RandomFieldOptions opts;
  opts.components = 2;
  const SpectralField f = random_field(g, power_law_envelope(1.5), rng, opts);
  CHECK(f.hermitian_defect() < 1e-15);
  CHECK(f.is_dealiased());
  CHECK(std::abs(f(0, 0)) == 0.0);
  const SolenoidalField u = random_solenoidal(g, power_law_envelope(1.5), rng);
  CHECK(divergence_defect(u.field()) < 1e-12);
}

TEST_CASE("Leray projection") {
  const Grid g(3, 16);
  Rng rng(1);
  RandomFieldOptions opts;
  opts.components = 3;
  const SpectralField v = random_field(g, power_law_envelope(1.0), rng, opts);
  const SolenoidalField p = leray_project(v);
  CHECK(oracle::l2(divergence(p.field())) < 1e-13);
  CHECK(oracle::rel_diff(leray_project(p.field()).field(), p.field()) < 1e-14);
  // The removed part is a gradient: orthogonal to the projection.
  CHECK(std::abs(inner_product(v - p.field(), p.field())) < 1e-13);

  SpectralField bad = v;
  bad(0, 5) += Complex(0.0, 1.0);
  CHECK_THROWS_AS(leray_project(bad), SymmetryError);
  CHECK_THROWS_AS(SolenoidalField::check(v), ParameterError);
}

TEST_CASE("gradient and divergence of a single mode") {
  const Grid g(2, 16);
  SpectralField f(g, 1);
  oracle::add_mode(f, 0, {2, 1, 0}, Complex(1.0, 0.0));
  const SpectralField gr = gradient(f);
  const std::size_t i = g.flat_index({2, 1, 0});
  CHECK(gr(0, i) == Complex(0.0, 2.0));
  CHECK(gr(1, i) == Complex(0.0, 1.0));
  CHECK(gr.hermitian_defect() < 1e-15);
  SpectralField v(g, 2);
  oracle::add_mode(v, 0, {2, 1, 0}, Complex(1.0, 0.0));
  CHECK(divergence(v)(0, i) == Complex(0.0, 2.0));
}

TEST_CASE("transport equals the mode-pair convolution") {
  const Grid g(2, 16);
  Rng rng(4);
  RandomFieldOptions opts;
  opts.components = 2;
  const SpectralField a = random_field(g, power_law_envelope(1.0), rng, opts);
  const SpectralField v = random_field(g, power_law_envelope(1.0), rng, opts);
  CHECK(oracle::rel_diff(transport(a, v), oracle::convolution_transport(a, v)) < 1e-13);
}

TEST_CASE("transport by a solenoidal field equals the divergence form") {
  const Grid g(2, 32);
  Rng rng(5);
  const SolenoidalField u = random_solenoidal(g, power_law_envelope(2.0), rng);
  RandomFieldOptions opts;
  opts.components = 2;
  const SpectralField v = random_field(g, power_law_envelope(2.0), rng, opts);
  // ∇·(u⊗v)_c = Σ_j ∂_j(u_j v_c), built with the same dealiased products.
  const PhysicalField pu = to_physical(u.field()), pv = to_physical(v);
  SpectralField div_form(g, 2);
  for (int c = 0; c < 2; ++c) {
    for (int j = 0; j < 2; ++j) {
      std::vector<double> prod(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) prod[i] = pu.components[j][i] * pv.components[c][i];
      const SpectralField p = to_spectral(g, PhysicalField{{prod}});
      for (std::size_t i = 0; i < g.size(); ++i) div_form(c, i) += Complex(0.0, g.wavevector(i)[j]) * p(0, i);
    }
  }
  div_form.dealias();
  CHECK(oracle::rel_diff(advect(u, v), div_form) < 1e-12);
}

TEST_CASE("inner product is the physical mean") {
  const Grid g(2, 16);
  Rng rng(6);
  RandomFieldOptions opts;
  const SpectralField a = random_field(g, power_law_envelope(1.0), rng, opts);
  const SpectralField b = random_field(g, power_law_envelope(1.0), rng, opts);
  const auto pa = to_physical(a, 0), pb = to_physical(b, 0);
  double mean = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) mean += pa[i] * pb[i];
  mean /= static_cast<double>(g.size());
  CHECK(inner_product(a, b) == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("fractional Laplacian") {
  const Grid g(2, 16);
  SpectralField f(g, 1);
  oracle::add_mode(f, 0, {3, 4, 0}, Complex(1.0, 0.0));
  oracle::add_mode(f, 0, {0, 0, 0}, Complex(2.0, 0.0));
  const SpectralField l = fractional_laplacian(f, 0.5);
  CHECK(std::abs(l(0, g.flat_index({3, 4, 0})) - 5.0) < 1e-14);
  CHECK(std::abs(l(0, 0)) == 0.0);
  CHECK_THROWS_AS(fractional_laplacian(f, 0.0), ParameterError);
}
