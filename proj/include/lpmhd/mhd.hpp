#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lpmhd/error.hpp"
#include "lpmhd/spectral_field.hpp"

namespace lpmhd {

/// Velocity u, magnetic field b and time of the non-resistive MHD system
///   u_t + u·∇u − b·∇b + ∇p = νΔu,   b_t + u·∇b − b·∇u = 0.
struct MhdState {
  SolenoidalField u;
  SolenoidalField b;
  double t = 0.0;

  static MhdState zero(const Grid& grid, double t = 0.0);
  const Grid& grid() const { return u.grid(); }
};

struct SolverParams {
  double nu = 0.05;
  double dt = 1e-3;
  /// Regularity index of the blow-up monitor ‖u‖²_{Ḣˢ} + ‖b‖²_{Ḣ^{s+1}}.
  double s = 1.0;
  double blowup_factor = 1e6;
  double cfl_limit = 0.5;
  /// Re-project b after every step (off by default; drift is monitored instead).
  bool reproject_b = false;
  int diagnostics_every = 1;

  void validate() const;
};

struct MhdRhs {
  SpectralField du;
  SpectralField db;
};

/// Δt·max(‖u‖_∞, ‖b‖_∞)·N, sup over collocation points.
double cfl_number(const MhdState& state, const SolverParams& params);

/// du/dt = P(−u·∇u + b·∇b) + νΔu, db/dt = −u·∇b + b·∇u, dealiased products.
/// Throws CflError when cfl_number exceeds params.cfl_limit.
MhdRhs rhs(const MhdState& state, const SolverParams& params);

/// rhs without the CFL check.
MhdRhs rhs_unchecked(const MhdState& state, double nu);

class BlowUpError : public NumericalError {
 public:
  BlowUpError(const std::string& what, MhdState last_valid)
      : NumericalError(what), last_valid_(std::move(last_valid)) {}
  const MhdState& last_valid() const { return last_valid_; }

 private:
  MhdState last_valid_;
};

/// One step of length params.dt: fourth-order Runge–Kutta in the variables
/// e^{−νΔt'|k|²}-integrated for u (Lawson form), so viscosity is exact per
/// mode and transport is explicit. Throws CflError before stepping and
/// BlowUpError (carrying `state`) on a non-finite result.
MhdState step(const MhdState& state, const SolverParams& params);

/// ‖u‖²_{Ḣˢ} + ‖b‖²_{Ḣ^{s+1}} with the Fourier multiplier |k|.
double regularity_functional_direct(const MhdState& state, double s);

struct Diagnostics {
  double t = 0.0;
  double energy_u = 0.0;     // ‖u‖₂²
  double energy_b = 0.0;     // ‖b‖₂²
  double dissipation = 0.0;  // ‖∇u‖₂²
  double A = 0.0;            // regularity_functional_direct
  double div_u = 0.0;
  double div_b = 0.0;
  double tail_fraction = 0.0;  // energy share of |k| > 2/3 of the retained radius

  double energy() const { return energy_u + energy_b; }
};

Diagnostics diagnose(const MhdState& state, double s);

struct RunResult {
  MhdState final_state;
  std::vector<Diagnostics> series;
  bool blew_up = false;
  double failure_time = 0.0;
  std::string failure;
  long steps = 0;
};

using StepObserver = std::function<void(const MhdState&, long step)>;

/// Integrates to t_end (the last step is shortened to land on it). A
/// non-finite state or A > blowup_factor·A(t₀) stops the run with
/// blew_up = true; CFL violations propagate as CflError.
RunResult run(const MhdState& initial, const SolverParams& params, double t_end,
              const StepObserver& observer = nullptr);

struct EnergyReport {
  double initial_energy = 0.0;
  double max_D = 0.0;      // max over t₀ < t of D(t₀, t)
  double max_abs_D = 0.0;  // max over t₀ < t of |D(t₀, t)|
  double max_tail_fraction = 0.0;
  bool spurious = false;        // max_D above tolerance·initial energy
  bool under_resolved = false;  // tail fraction above tail_tolerance
  std::vector<double> balance;  // E(t) + 2ν∫₀ᵗ‖∇u‖² − E(0), trapezoidal
};

/// D(t₀, t) = E(t) − E(t₀) + 2ν∫_{t₀}^t ‖∇u‖₂² over every sample pair.
EnergyReport energy_report(const std::vector<Diagnostics>& series, double nu, double tolerance = 1e-6,
                           double tail_tolerance = 1e-8);
EnergyReport energy_report(const std::vector<MhdState>& history, double nu, double tolerance = 1e-6,
                           double tail_tolerance = 1e-8);

/// Lattice dilation for integer λ: the coefficient at k moves to λk, modes
/// landing outside the dealiased box are dropped.
SpectralField dilate(const SpectralField& f, int lambda);

/// u_λ = λu(λx), b_λ = λb(λx) (time is not needed for a snapshot).
MhdState scale_state(const MhdState& state, int lambda);

/// ‖R(S_λ state) − λ³·dilate(R(state))‖₂ / ‖λ³·dilate(R(state))‖₂ with R the
/// right-hand side. Requires N divisible by λ and every mode of the state
/// within |k_i| ≤ ⌊N/3⌋/λ (ParameterError otherwise).
double scaling_residual(const MhdState& state, double nu, int lambda = 2);

/// Orszag–Tang vortex, n = 2: u = (−sin y, sin x), b = (−sin y, sin 2x), t = 0.
MhdState orszag_tang(const Grid& grid);

}  // namespace lpmhd
