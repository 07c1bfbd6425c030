#pragma once

#include <cstdint>
#include <vector>

#include "lpmhd/spectral_field.hpp"

namespace lpmhd {

/// Fractional Stokes problem u_t + ν(−Δ)^α u + ∇p = f, div u = 0.
struct StokesConfig {
  double nu = 1.0;
  double alpha = 1.0;
  double s = 1.2;
  double T = 1.0;
  std::vector<double> eps_list{1e-1, 1e-2, 1e-3, 1e-4};  // decreasing, in (0, T)
  double dt = 1e-5;                                       // forced runs only

  /// Throws ParameterError. The Δt ≤ min ε/10 rule is checked only when
  /// `forced` is set.
  void validate(bool forced = false) const;
};

/// |û_k| = |k|^{−σ}, σ = s + n/2 + margin, random phases.
struct RoughDataSpec {
  double s = 1.2;
  double margin = 0.01;
  std::uint64_t seed = 1;

  double slope(int dimension) const { return s + 0.5 * dimension + margin; }
};

/// Unit-modulus random phases on the dealiased box, Leray-projected and
/// scaled to ‖·‖_{H^s} = 1 (inhomogeneous weight (1+|k|²)^s).
SolenoidalField rough_data(const RoughDataSpec& spec, const Grid& grid);

/// Same construction with |û_k| = e^{−|k|²/2} on |k| ≤ 16 and zero beyond.
SolenoidalField smooth_data(double s, std::uint64_t seed, const Grid& grid);

/// û_k(t) = e^{−ν|k|^{2α}t} û_k(0).
SolenoidalField evolve_free(const SolenoidalField& u0, double t, const StokesConfig& cfg);

/// Forcing sampled at t_j = j·dt, j = 0 … M.
struct ForcingSeries {
  double dt = 0.0;
  std::vector<SpectralField> samples;
};

/// Trajectory u(t_j), j = 0 … M. f is Leray-projected, linearly interpolated
/// between samples and integrated exactly against the semigroup (second-order
/// exponential time differencing).
std::vector<SolenoidalField> evolve_forced(const SolenoidalField& u0, const ForcingSeries& f, const StokesConfig& cfg);

/// ‖∇^α u(t)‖_{H^{s+α}} for the free evolution of u0:
/// (Σ_k |k|^{2α}(1+|k|²)^{s+α} e^{−2ν|k|^{2α}t} |û_k(0)|²)^{1/2}.
class MaximalRegularityIntegrand {
 public:
  MaximalRegularityIntegrand(const SpectralField& u0, const StokesConfig& cfg);
  double operator()(double t) const;

 private:
  std::vector<double> rate_;    // 2ν|k|^{2α} per distinct |k|²
  std::vector<double> weight_;  // Σ over the shell of the spatial weights times |û_k|²
};

struct LogScanRow {
  double eps = 0.0;
  double J = 0.0;
  double fitted = 0.0;
  double quadrature_error = 0.0;
};

struct LogScanReport {
  double a = 0.0;
  double b = 0.0;
  double r2 = 0.0;
  double data_hs_norm = 0.0;
  std::vector<LogScanRow> rows;
};

/// J(ε) = ∫_ε^T ‖∇^α u(t)‖_{H^{s+α}} dt for each ε, then the least-squares
/// fit J ≈ a + b log(T/ε).
LogScanReport log_scan(const SolenoidalField& u0, const StokesConfig& cfg, double rel_tol = 1e-10);
LogScanReport log_scan(const RoughDataSpec& spec, const Grid& grid, const StokesConfig& cfg, double rel_tol = 1e-10);

struct LinearFit {
  double a = 0.0;
  double b = 0.0;
  double r2 = 0.0;
};

/// Least squares y ≈ a + b x. Needs two distinct abscissae.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct HeatSumRow {
  double t = 0.0;
  double series = 0.0;
  double ratio = 0.0;  // series · (νt)^{1/2}
  int terms = 0;
};

struct HeatSumReport {
  double nu = 0.0;
  double alpha = 0.0;
  std::vector<HeatSumRow> rows;
  double sup_ratio = 0.0;
};

/// Σ_{q≥−1} λ_q^α e^{−νλ_q^{2α}t/4}, summed past the peak until terms drop
/// below 1e−16.
double heat_sum(double nu, double alpha, double t, int* terms = nullptr);
HeatSumReport heat_sum_check(double nu, double alpha, const std::vector<double>& t_list);

/// n log-spaced samples of [lo, hi], endpoints included.
std::vector<double> log_space(double lo, double hi, int n);

}  // namespace lpmhd
