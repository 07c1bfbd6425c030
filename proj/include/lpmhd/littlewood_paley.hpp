#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lpmhd/spectral_field.hpp"

namespace lpmhd {

/// Dyadic cutoff pair: χ is radial, equal to 1 on |ξ| ≤ 3/4 and 0 on |ξ| ≥ 1;
/// φ(ξ) = χ(ξ/2) − χ(ξ) is supported in the annulus 3/4 ≤ |ξ| ≤ 2.
///
/// The transition of χ on [3/4, 1] is 1 − S(t), t = 4(|ξ| − 3/4), where S is a
/// step from S(0) = 0 to S(1) = 1. The default step is the C^∞ bump quotient
/// S(t) = B(t)/(B(t) + B(1−t)), B(t) = e^{−1/t}.
class DyadicCutoff {
 public:
  using Step = std::function<double(double)>;

  /// Registered steps: "exp-bump" (default, C^∞) and "smoothstep7"
  /// (degree-7 polynomial, C³).
  static DyadicCutoff build(const std::string& profile = "exp-bump");
  /// Validates a custom step: S(0) = 0, S(1) = 1, values in [0,1], monotone.
  /// Throws ParameterError on violation.
  static DyadicCutoff from_step(std::string name, Step step);

  const std::string& name() const { return name_; }

  double chi(double r) const;
  double phi(double r) const { return chi(0.5 * r) - chi(r); }
  /// Symbol of Δ_q at radius r: χ(r) for q = −1, φ(2^{−q} r) for q ≥ 0.
  double block_symbol(int q, double r) const;

 private:
  DyadicCutoff(std::string name, Step step) : name_(std::move(name)), step_(std::move(step)) {}
  std::string name_;
  Step step_;
};

/// λ_q = 2^q (so λ_{−1} = 1/2).
inline double dyadic_scale(int q) { return std::ldexp(1.0, q); }

/// Largest shell index q whose annulus meets the lattice of `grid`:
/// the largest q with 3·2^q/4 < max |k|.
int max_shell(const Grid& grid);

class LittlewoodPaley;

/// The dyadic pieces u_q, q = −1 … Q_max, of one field.
class LPBlocks {
 public:
  int q_max() const { return static_cast<int>(blocks_.size()) - 2; }
  const SpectralField& block(int q) const;
  const Grid& grid() const { return blocks_.front().grid(); }

  /// u_{≤Q} = Σ_{q≤Q} u_q, −1 ≤ Q ≤ Q_max.
  SpectralField low_pass(int Q) const;
  /// u_{(Q,M]} = Σ_{Q<p≤M} u_p, −1 ≤ Q ≤ M ≤ Q_max.
  SpectralField band(int Q, int M) const;
  /// ũ_q = Σ_{|p−q|≤1} u_p.
  SpectralField tilde_block(int q) const;
  /// Σ_q u_q.
  SpectralField reconstruct() const;

 private:
  friend class LittlewoodPaley;
  explicit LPBlocks(std::vector<SpectralField> blocks) : blocks_(std::move(blocks)) {}
  void require_index(int q, const char* where) const;
  std::vector<SpectralField> blocks_;
};

/// Dyadic projector bank for one grid: caches the multiplier of every Δ_q
/// and applies them. Immutable after construction.
class LittlewoodPaley {
 public:
  LittlewoodPaley(Grid grid, DyadicCutoff cutoff);

  const Grid& grid() const { return grid_; }
  const DyadicCutoff& cutoff() const { return cutoff_; }
  int q_max() const { return q_max_; }

  /// Multiplier of Δ_q at flat index i; zero for q outside [−1, Q_max].
  double symbol(int q, std::size_t i) const;

  /// Δ_q u; the zero field for q outside [−1, Q_max].
  SpectralField block(const SpectralField& u, int q) const;
  /// u_{≤Q} as a sum of blocks: zero for Q < −1, all of u's blocks for Q ≥ Q_max.
  SpectralField low_pass(const SpectralField& u, int Q) const;
  /// ũ_q = Σ_{|p−q|≤1} Δ_p u.
  SpectralField tilde_block(const SpectralField& u, int q) const;

  LPBlocks decompose(const SpectralField& u) const;

 private:
  Grid grid_;
  DyadicCutoff cutoff_;
  int q_max_;
  std::vector<std::vector<double>> symbols_;  // index q + 1
};

/// (Σ_q λ_q^{2s} ‖u_q‖₂²)^{1/2}.
double block_sobolev_norm(const LPBlocks& blocks, double s);

/// sup_q λ_q^s ‖u_q‖_p. p = 2 is exact, p = ∞ uses collocation points, other
/// p use quadrature on the 2× oversampled grid.
double besov_norm(const LPBlocks& blocks, double s, double p);

/// ‖u_q‖_r / (λ_q^{n(1/s − 1/r)} ‖u_q‖_s) for a field band-limited to shell q.
/// Requires r ≥ s ≥ 1 (either may be +inf). Zero field gives 0.
double bernstein_ratio(const SpectralField& u_q, int q, double r, double s);

/// ‖·‖_p with the conventions of besov_norm.
double block_lp_norm(const SpectralField& u, double p);

// --- ensemble scans feeding the fitted-constant table ----------------------

struct EquivalenceScan {
  double c1 = 0.0;  // min over fields and s of block / direct homogeneous norm
  double c2 = 0.0;  // max of the same ratio
  int samples = 0;
  std::vector<double> s_values;
  std::vector<double> min_by_s;
  std::vector<double> max_by_s;
};

/// Random zero-mean fields with envelopes (1+|k|)^{-σ}, σ drawn in [0.5, 3].
EquivalenceScan norm_equivalence_scan(const LittlewoodPaley& lp, int samples, const std::vector<double>& s_values,
                                      std::uint64_t seed);

/// Largest shell fully inside the lattice box: 2^{q+1} ≤ N/2 − 1.
int max_resolved_shell(const Grid& grid);

struct BernsteinScan {
  double r = 0.0;
  double s = 0.0;
  int samples_per_shell = 0;
  std::vector<int> shells;
  std::vector<double> max_ratio;  // per entry of `shells`
  double constant = 0.0;          // max over shells
  double spread = 0.0;            // (max − min) / mean over shells
};

/// Shell-q fields Δ_q g with ĝ_k = a_k e^{i(ψ_k − k·x₀)}: x₀ a random grid
/// point, a_k ∈ [1 − ρ/2, 1], ψ_k ∈ [−ρπ, ρπ], the coherence parameter ρ
/// sweeping [0, 1] across the ensemble. ρ = 0 members are the peaked fields
/// that extremize ‖·‖_∞/‖·‖₂; ρ = 1 members are random-phase noise.
/// Shells 2 … max_resolved_shell(grid) are scanned.
BernsteinScan bernstein_scan(const LittlewoodPaley& lp, int samples_per_shell, double r, double s,
                             std::uint64_t seed);

}  // namespace lpmhd
