#pragma once

#include <cstdint>
#include <vector>

#include "lpmhd/littlewood_paley.hpp"
#include "lpmhd/random_fields.hpp"
#include "lpmhd/spectral_field.hpp"

namespace lpmhd {

/// The three paraproduct pieces of Δ_q(u·∇v).
struct BonySplit {
  SpectralField low_high;   // Σ_{|q−p|≤2} Δ_q(u_{≤p−2}·∇v_p)
  SpectralField high_low;   // Σ_{|q−p|≤2} Δ_q(u_p·∇v_{≤p−2})
  SpectralField high_high;  // Σ_{p≥q−2} Δ_q(ũ_p·∇v_p)
  int q = -1;

  SpectralField sum() const;
};

/// Each term is a dealiased product, so the pieces add up to Δ_q(advect(u, v)).
/// Requires −1 ≤ q ≤ Q_max.
BonySplit bony_split(const LittlewoodPaley& lp, const SolenoidalField& u, const SpectralField& v, int q);

/// [Δ_q, u_{≤p−2}·∇]v_p = Δ_q(u_{≤p−2}·∇v_p) − u_{≤p−2}·∇Δ_q v_p.
/// u_{≤p−2} is the zero field when p < 1.
SpectralField commutator(const LittlewoodPaley& lp, int q, int p, const SolenoidalField& u, const SpectralField& v);

/// ‖[Δ_q, u_{≤p−2}·∇]v_p‖_r / (‖∇u_{≤p−2}‖_∞ ‖v_p‖_r), 1 < r < ∞.
/// A vanishing denominator gives 0 when the numerator is below 1e−13 and
/// DegenerateRatioError otherwise.
double commutator_bound_ratio(const LittlewoodPaley& lp, int q, int p, const SolenoidalField& u,
                              const SpectralField& v, double r = 2.0);

/// Max of commutator_bound_ratio over `samples` draws at a fixed (q, p).
/// u: divergence-free, `modes` Fourier modes at radii uniform in
/// [2^{p−4}, 2^{p−2}] (clamped to ≥ 1). v: random phases under a Gaussian ring
/// of width 0.08·2^q centred at ρ·2^q or ρ·2^{q+1}, ρ ∈ [0.7, 1.05], i.e. on
/// the transition bands of φ_q where the commutator lives.
double commutator_pair_max(const LittlewoodPaley& lp, int q, int p, int samples, double r, Rng& rng, int modes = 1);

struct CommutatorScan {
  double r = 2.0;
  int samples_per_shell = 0;
  std::vector<int> shells;
  std::vector<double> max_ratio;
  double constant = 0.0;
  double spread = 0.0;  // (max − min) / mean over shells
};

/// Largest q whose upper transition ring (radius ≤ 1.05·2^{q+1} plus two
/// widths) fits inside the dealiased box, so v is never clipped by the box.
int max_commutator_shell(const Grid& grid);

/// Shells q = 3 … min(Q_max − 1, max_commutator_shell), each with samples_per_shell draws of
/// commutator_pair_max split evenly over p = q − 1, q, q + 1. Pairs with
/// |p − q| = 2 are skipped: with u confined to |k| ≤ 2^{p−2}, the product
/// u·∇v_p has no mass in shell q there, so every such draw gives 0.
CommutatorScan commutator_scan(const LittlewoodPaley& lp, int samples_per_shell, double r, std::uint64_t seed,
                               int modes = 1);

}  // namespace lpmhd
