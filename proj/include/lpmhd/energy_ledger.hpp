#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lpmhd/littlewood_paley.hpp"
#include "lpmhd/mhd.hpp"

namespace lpmhd {

/// Checks s > n/2 − 1 and n/2 < r ≤ s + 1. Throws ParameterError.
void require_admissible(int dimension, double s, double r);

/// Block-summed transport fluxes of the Sobolev energy balance:
///   I1 =  Σ_q λ_q^{2s} ⟨Δ_q(u·∇u), u_q⟩    I2 = −Σ_q λ_q^{2s} ⟨Δ_q(b·∇b), u_q⟩
///   I3 =  Σ_q λ_q^{2r} ⟨Δ_q(u·∇b), b_q⟩    I4 = −Σ_q λ_q^{2r} ⟨Δ_q(b·∇u), b_q⟩
/// and their paraproduct pieces. Ix1 / Ix2 / Ix3 are the low–high, high–low
/// and high–high parts; I11 and I31 are further split into the commutator
/// part (I111, I311), the part transported by u_{≤q−2} (I112, I312, zero
/// since that field is divergence-free) and the remainder (I113, I313).
struct FluxTerms {
  double s = 0.0;
  double r = 0.0;
  double I1 = 0.0, I2 = 0.0, I3 = 0.0, I4 = 0.0;
  double I11 = 0.0, I12 = 0.0, I13 = 0.0;
  double I111 = 0.0, I112 = 0.0, I113 = 0.0;
  double I21 = 0.0, I22 = 0.0, I23 = 0.0;
  double I31 = 0.0, I32 = 0.0, I33 = 0.0;
  double I311 = 0.0, I312 = 0.0, I313 = 0.0;
  double I41 = 0.0, I42 = 0.0, I43 = 0.0;
};

struct FluxTotals {
  double I1 = 0.0, I2 = 0.0, I3 = 0.0, I4 = 0.0;
};

FluxTerms flux_terms(const MhdState& state, double s, double r, const LittlewoodPaley& lp);
/// I1 … I4 only (one dealiased product per term).
FluxTotals flux_totals(const MhdState& state, double s, double r, const LittlewoodPaley& lp);

/// A = Σ_q λ_q^{2s}‖u_q‖₂² + Σ_q λ_q^{2s+2}‖b_q‖₂².
double A_of_t(const MhdState& state, double s, const LittlewoodPaley& lp);

/// Σ_q λ_q^{2σ}‖f_q‖₂² as one weighted sum over modes with the weights
/// Σ_q λ_q^{2σ} φ_q(k)² precomputed; agrees with block_sobolev_norm².
class BlockWeights {
 public:
  BlockWeights(const LittlewoodPaley& lp, double sigma);
  double operator()(const SpectralField& f) const;

 private:
  std::vector<double> w_;
};

// --- interpolation constants -------------------------------------------------

struct InterpolationRatios {
  double R_bb = 0.0;  // ‖(b·∇)b‖_{H^s} / ‖b‖²_{H^{s+1}}
  double R_uu = 0.0;  // ‖(u·∇)u‖_{H^s} / (‖u‖₂^{θ}‖u‖_{H^{s+1}}^{2−θ}), θ = 1 − n/(2(s+1))
};

InterpolationRatios interpolation_ratios(const SolenoidalField& u, const SolenoidalField& b, double s);

struct InterpolationReport {
  double s = 0.0;
  int samples = 0;
  double R_bb = 0.0;  // ensemble max
  double R_uu = 0.0;
};

/// Random solenoidal fields with spectra (1+|k|)^{−σ}, σ drawn uniformly in
/// [s + 1 + n/2 + 0.5, s + 1 + n/2 + 3], on the dealiased box.
InterpolationReport interpolation_checks(const Grid& grid, int samples, double s, std::uint64_t seed);

// --- continuation constants and window ---------------------------------------

struct PropagationConstants {
  int n = 2;
  double s = 1.2;
  double nu = 0.05;
  double t0 = 1.0;
  double A0 = 0.0;
  double M0 = 0.0;
  double M1 = 0.0;
  double beta = 0.0;
  double theta = 0.0;  // θ₁θ₂
  double C_nu = 1.0;
  double C_0 = 1.0;
  double gamma1 = 1.0, gamma2 = 1.0, gamma3 = 1.0;

  /// Fills β, θ₁θ₂ and M₁ = C_ν Σ_i (4A₀)^{1+γ_i} + C_ν (4A₀)². Throws
  /// ParameterError unless β > 1 and θ₁θ₂ ∈ (0, 1).
  static PropagationConstants build(int n, double s, double nu, double t0, double A0, double M0, double C_nu,
                                    double C_0, double gamma1 = 1.0, double gamma2 = 1.0, double gamma3 = 1.0);
};

/// F(T) = C_ν log(T/t₀)‖u₀‖_{H^s}
///      + C_ν (T − t₀)^{1−1/β} (A₀^β T + ν^{−1} M₀^{θ₁θ₂β/2}(A₀ + M₁T))^{1/β}.
double continuation_functional(const PropagationConstants& pc, double u0_Hs, double T);

struct Window {
  bool empty = false;
  double T = 0.0;
  double F = 0.0;
  double expF = 0.0;
  double growth = 0.0;  // 2M₁(T − t₀)/A₀
  std::string binding;  // "exp(F) < 2", "2 M1 (T - t0) / A0 < 1", "search limit"
  std::string reason;   // set when empty
};

/// Largest T ≤ T_search with e^F < 2 and 2M₁(T − t₀)/A₀ < 1, by bisection to
/// relative precision 1e−6 in T − t₀. A window shorter than min_window is
/// reported empty with the binding constraint named.
Window predicted_window(const PropagationConstants& pc, double u0_Hs, double T_search, double min_window = 0.0);

// --- ledger identity ---------------------------------------------------------

struct LedgerIdentity {
  double h = 0.0;
  double du_dt_fd = 0.0;      // centered difference of ½Σλ^{2s}‖u_q‖²
  double du_dt_flux = 0.0;    // −νΣλ^{2s}‖∇u_q‖² − I1 − I2
  double du_dt_flux_block = 0.0;  // same with νΣλ^{2s+2}‖u_q‖²
  double db_dt_fd = 0.0;      // centered difference of ½Σλ^{2r}‖b_q‖²
  double db_dt_flux = 0.0;    // −I3 − I4
  double residual_u = 0.0;
  double residual_b = 0.0;
};

/// Triple of states at t − h, t, t + h.
LedgerIdentity ledger_identity(const MhdState& before, const MhdState& middle, const MhdState& after, double nu,
                               double s, double r, const LittlewoodPaley& lp);

// --- constant calibration ----------------------------------------------------

struct CalibrationNeeds {
  double est_i1 = 0.0;
  double est_i2 = 0.0;
  double est_i3 = 0.0;
  double est_i4 = 0.0;
  double energy2 = 0.0;
  double energy4 = 0.0;
  double l1 = 0.0;
};

struct CalibrationResult {
  double C_nu = 0.0;
  double C_0 = 0.0;
  int samples = 0;
  CalibrationNeeds needs;  // ensemble maxima before the 1.1 margin
};

/// Smallest C₀, C_ν (times 1.1) for which the measured flux inequalities hold
/// on every state, with r = s + 1 and γ₁ = γ₂ = γ₃ = 1. C₀ bounds |I3| and |I4|
/// by C₀‖∇u‖_{H^{s+1}}‖b‖²_{Ḣ^r}; C_ν covers the remaining right-hand sides.
/// The L¹ prefactor C_sto ν^{−1} max(1, R_bb, R_uu) is returned in needs.l1
/// but not folded into C_ν.
CalibrationResult calibrate_constants(const std::vector<MhdState>& ensemble, double nu, double s,
                                      const LittlewoodPaley& lp, double C_sto, double R_bb, double R_uu);

/// u with spectrum |k|^{−(s + n/2 + margin)} scaled to ‖u‖_{H^s} = u_norm and
/// b with |k|^{−(s + 1 + n/2 + margin)} scaled to ‖b‖_{H^{s+1}} = b_norm; both
/// solenoidal with random phases on the dealiased box.
MhdState rough_state(const Grid& grid, double s, double u_norm, double b_norm, std::uint64_t seed,
                     double margin = 0.01, double t = 0.0);

// --- propagation experiment ---------------------------------------------------

/// Calibration states for calibrate_constants: rough_state draws whose
/// amplitudes run geometrically over [0.1, 100] and whose slopes exceed the
/// critical ones by 0.01 … 2.71, so both dissipation- and flux-dominated
/// states are present.
std::vector<MhdState> calibration_ensemble(const Grid& grid, double s, int samples, std::uint64_t seed,
                                           double t = 1.0);

struct PropagationConfig {
  int n = 2;
  int N = 256;
  double s = 1.2;
  double nu = 0.05;
  double t0 = 1.0;
  double T_search = 2.0;
  double dt = 1e-3;
  double u_norm = 1.0;
  double b_norm = 1.0;
  double margin = 0.01;
  std::uint64_t seed = 1;
  double min_window = 0.0;
  bool resolution_check = true;
};

struct TraceRow {
  double t = 0.0;
  double A = 0.0;
  double I1 = 0.0, I2 = 0.0, I3 = 0.0, I4 = 0.0;
  double energy_residual = 0.0;
};

struct PropagationReport {
  std::string verdict;  // PASS, FAIL or EMPTY-WINDOW
  PropagationConstants constants;
  Window window;
  double u0_Hs = 0.0;
  double T_achieved = 0.0;
  double max_A_ratio = 0.0;
  bool blew_up = false;
  double failure_time = 0.0;
  double dissipation_integral = 0.0;  // ∫‖∇u‖²_{H^s}
  double dissipation_bound = 0.0;     // ν^{−1}(A₀ + M₁(T − t₀))
  double l1_integral = 0.0;           // ∫‖∇u‖_{H^{s+1}}
  double l1_bound = 0.0;              // F(T)
  std::optional<double> coarse_max_A_ratio;  // same run at N/2
  double resolution_change = 0.0;            // |coarse − fine| / fine for max A/A₀
  bool converged = true;
  std::vector<TraceRow> trace;
};

/// Builds rough data at t₀ (u(t₀) stands in for u₀ in F and M₀), computes the
/// window from C_ν, C₀ and runs the solver to it. The trace is sampled at
/// every step. With resolution_check the run is repeated at N/2 on the
/// truncated data; a change below 5% counts as converged.
PropagationReport propagation_experiment(const PropagationConfig& cfg, double C_nu, double C_0);

}  // namespace lpmhd
