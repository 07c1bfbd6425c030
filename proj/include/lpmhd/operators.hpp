#pragma once

#include "lpmhd/spectral_field.hpp"

namespace lpmhd {

/// Leray projector: û_k − k (k·û_k)/|k|² for k ≠ 0, mean mode unchanged.
/// Rejects inputs whose Hermitian defect exceeds 1e-10 with SymmetryError.
SolenoidalField leray_project(const SpectralField& v);
/// Projection in place, skipping the symmetry check (hot paths whose input is
/// real by construction).
void leray_project_in_place(SpectralField& v);

/// û_k ↦ |k|^{2α} û_k; the mean mode maps to zero. α must be positive.
SpectralField fractional_laplacian(const SpectralField& u, double alpha);

/// Multiplies every mode by symbol(|k|²).
template <typename Symbol>
SpectralField apply_radial_multiplier(const SpectralField& u, Symbol&& symbol) {
  SpectralField out = u;
  const Grid& g = u.grid();
  for (int c = 0; c < out.components(); ++c) {
    auto comp = out.component(c);
    for (std::size_t i = 0; i < g.size(); ++i) comp[i] *= symbol(g.k2(i));
  }
  return out;
}

/// Components ordered c·n + j holding ∂_j u_c.
SpectralField gradient(const SpectralField& u);
SpectralField divergence(const SpectralField& v);

/// Dealiased (a·∇)v for an arbitrary vector field a; no solenoidality assumed.
SpectralField transport(const SpectralField& a, const SpectralField& v);

/// Dealiased (u·∇)v. For band-limited inputs this equals ∇·(u⊗v) up to
/// round-off because ∇·u = 0.
SpectralField advect(const SolenoidalField& u, const SpectralField& v);

/// Real L² inner product Σ_c ∫ f_c g_c under the normalized measure.
double inner_product(const SpectralField& f, const SpectralField& g);

double l2_norm(const SpectralField& u);

/// homogeneous: (Σ_{k≠0} |k|^{2s}|û_k|²)^{1/2};
/// otherwise:   (Σ_k (1+|k|²)^s |û_k|²)^{1/2}.
double sobolev_norm_direct(const SpectralField& u, double s, bool homogeneous);

/// Maximum over collocation points of the pointwise Euclidean magnitude.
double linf_norm(const SpectralField& u);

/// (∫ |u|^p)^{1/p} by collocation on a grid `oversample` times finer;
/// p = +inf gives the oversampled maximum.
double lp_norm(const SpectralField& u, double p, int oversample = 2);

/// ‖∇u‖_∞ with the Frobenius norm of the gradient matrix at each point.
double gradient_linf_norm(const SpectralField& u);

}  // namespace lpmhd
