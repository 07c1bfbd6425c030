#include <doctest.h>

#include <cmath>

#include "lpmhd/error.hpp"
#include "lpmhd/fft.hpp"
#include "lpmhd/mhd.hpp"
#include "lpmhd/operators.hpp"
#include "lpmhd/random_fields.hpp"
#include "oracles.hpp"

using namespace lpmhd;

namespace {

MhdState random_state(const Grid& g, std::uint64_t seed, double slope = 2.0) {
  Rng rng(seed);
  MhdState st = MhdState::zero(g);
  st.u = random_solenoidal(g, power_law_envelope(slope), rng);
  st.b = random_solenoidal(g, power_law_envelope(slope), rng);
  return st;
}

// State with every mode inside |k_i| ≤ K.
MhdState band_limited_state(const Grid& g, std::uint64_t seed, int K) {
  Rng rng(seed);
  auto env = [](double k) { return std::pow(1.0 + k, -1.5); };
  RandomFieldOptions opts;
  opts.components = g.dimension();
  auto restrict_box = [&](SpectralField f) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (int d = 0; d < g.dimension(); ++d) {
        if (std::abs(g.wavevector(i)[d]) > K) {
          for (int c = 0; c < f.components(); ++c) f(c, i) = 0.0;
          break;
        }
      }
    }
    return leray_project(f);
  };
  MhdState st = MhdState::zero(g);
  st.u = restrict_box(random_field(g, env, rng, opts));
  st.b = restrict_box(random_field(g, env, rng, opts));
  return st;
}

SpectralField laplacian_term(const SpectralField& u, double nu) {
  SpectralField out = u;
  for (std::size_t i = 0; i < u.grid().size(); ++i)
    for (int c = 0; c < u.components(); ++c) out(c, i) *= -nu * u.grid().k2(i);
  return out;
}

}  // namespace

TEST_CASE("zero magnetic field reduces to Navier-Stokes") {
  const Grid g(2, 32);
  MhdState st = random_state(g, 1);
  st.b = SolenoidalField::trusted(SpectralField(g, 2));
  const MhdRhs r = rhs_unchecked(st, 0.1);
  const SpectralField nse =
      laplacian_term(st.u.field(), 0.1) - leray_project(transport(st.u.field(), st.u.field())).field();
  CHECK(oracle::rel_diff(r.du, nse) < 1e-13);
  CHECK(oracle::l2(r.db) == 0.0);
}

TEST_CASE("equal velocity and magnetic fields freeze b") {
  const Grid g(2, 32);
  MhdState st = random_state(g, 2);
  st.b = st.u;
  const MhdRhs r = rhs_unchecked(st, 0.1);
  CHECK(oracle::l2(r.db) < 1e-15 * oracle::l2(st.u.field()));
}

TEST_CASE("nonlinear terms cancel in the energy") {
  for (int n : {2, 3}) {
    const Grid g(n, n == 2 ? 64 : 16);
    const MhdState st = random_state(g, 3);
    const SpectralField &u = st.u.field(), &b = st.b.field();
    const double lorentz = inner_product(transport(b, b), u);
    const double stretch = inner_product(transport(b, u), b);
    CHECK(std::abs(lorentz + stretch) < 1e-13 * std::abs(lorentz));
    CHECK(std::abs(inner_product(transport(u, u), u)) < 1e-13 * oracle::l2(u) * oracle::l2(gradient(u)) * oracle::l2(u));
    // d/dt (‖u‖² + ‖b‖²) = −2ν‖∇u‖²
    const MhdRhs r = rhs_unchecked(st, 0.2);
    const double dE = 2.0 * (inner_product(r.du, u) + inner_product(r.db, b));
    const double grad2 = std::pow(l2_norm(gradient(u)), 2);
    CHECK(dE == doctest::Approx(-0.4 * grad2).epsilon(1e-12));
  }
}

TEST_CASE("shear mode decays exactly") {
  const Grid g(2, 32);
  MhdState st = MhdState::zero(g);
  SpectralField f(g, 2);
  oracle::add_mode(f, 0, {0, 3, 0}, Complex(0.4, 0.0));
  st.u = SolenoidalField::check(f);
  SolverParams p;
  p.nu = 0.3;
  p.dt = 0.01;
  const RunResult res = run(st, p, 0.2);
  CHECK(!res.blew_up);
  CHECK(res.final_state.t == doctest::Approx(0.2));
  const double factor = std::exp(-0.3 * 9.0 * 0.2);
  CHECK(oracle::rel_diff(res.final_state.u.field(), factor * f) < 1e-13);
}

TEST_CASE("Orszag-Tang data") {
  const Grid g(2, 64);
  const MhdState st = orszag_tang(g);
  const Diagnostics d = diagnose(st, 1.0);
  CHECK(d.energy_u == doctest::Approx(1.0));
  CHECK(d.energy_b == doctest::Approx(1.0));
  CHECK(d.div_u < 1e-14);
  CHECK(d.div_b < 1e-14);
  const auto u0 = to_physical(st.u.field(), 0);
  for (std::size_t i = 0; i < g.size(); i += 37) {
    const auto x = oracle::position(g, i);
    CHECK(u0[i] == doctest::Approx(-std::sin(x[1])).epsilon(1e-12).scale(1.0));
  }
  CHECK_THROWS_AS(orszag_tang(Grid(3, 16)), ParameterError);
}

TEST_CASE("short run conserves the energy balance") {
  const Grid g(2, 64);
  SolverParams p;
  p.nu = 0.05;
  p.dt = 1e-3;
  const RunResult res = run(orszag_tang(g), p, 0.1);
  REQUIRE(!res.blew_up);
  CHECK(res.steps == 100);
  const EnergyReport rep = energy_report(res.series, p.nu);
  CHECK(rep.initial_energy == doctest::Approx(2.0));
  CHECK(rep.max_abs_D < 1e-6 * rep.initial_energy);
  CHECK(!rep.spurious);
  for (double v : rep.balance) CHECK(std::abs(v) < 1e-6);
}

TEST_CASE("last step lands on the end time") {
  const Grid g(2, 32);
  SolverParams p;
  p.dt = 1e-3;
  long calls = 0;
  const RunResult res = run(orszag_tang(g), p, 0.0105, [&](const MhdState&, long) { ++calls; });
  CHECK(res.final_state.t == doctest::Approx(0.0105).epsilon(1e-14));
  CHECK(res.steps == 11);
  CHECK(calls >= 11);
  CHECK_THROWS_AS(run(orszag_tang(g), p, -1.0), ParameterError);
}

TEST_CASE("CFL violation is reported") {
  const Grid g(2, 64);
  SolverParams p;
  p.dt = 0.1;
  CHECK(cfl_number(orszag_tang(g), p) > p.cfl_limit);
  CHECK_THROWS_AS(step(orszag_tang(g), p), CflError);
  CHECK_THROWS_AS(rhs(orszag_tang(g), p), CflError);
  p.dt = 0.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
}

TEST_CASE("growth monitor stops the run") {
  const Grid g(2, 64);
  SolverParams p;
  p.blowup_factor = 1.05;
  const RunResult res = run(orszag_tang(g), p, 1.0);
  CHECK(res.blew_up);
  CHECK(res.failure_time < 1.0);
  CHECK(!res.failure.empty());
}

TEST_CASE("dilation of a single mode") {
  const Grid g(2, 32);
  SpectralField f(g, 1);
  oracle::add_mode(f, 0, {1, 2, 0}, Complex(0.3, 0.1));
  const SpectralField d = dilate(f, 2);
  CHECK(d(0, g.flat_index({2, 4, 0})) == Complex(0.3, 0.1));
  CHECK(d(0, g.flat_index({1, 2, 0})) == Complex(0.0, 0.0));
  CHECK(oracle::l2(dilate(f, 1) - f) == 0.0);
  SpectralField far(g, 1);
  oracle::add_mode(far, 0, {8, 0, 0}, Complex(1.0, 0.0));
  CHECK(oracle::l2(dilate(far, 2)) == 0.0);
}

TEST_CASE("scaling symmetry of the equations") {
  const Grid g(2, 64);
  const MhdState st = band_limited_state(g, 7, 10);
  CHECK(scaling_residual(st, 0.1, 1) < 1e-15);
  CHECK(scaling_residual(st, 0.1, 2) < 1e-12);
  const MhdState wide = band_limited_state(g, 8, 20);
  CHECK_THROWS_AS(scaling_residual(wide, 0.1, 2), ParameterError);
  CHECK_THROWS_AS(scaling_residual(st, 0.1, 3), ParameterError);
}
