#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "lpmhd/grid.hpp"

namespace lpmhd {

using Complex = std::complex<double>;

/// Physical-space samples, one array per component, in grid flat order.
struct PhysicalField {
  std::vector<std::vector<double>> components;
};

/// A real scalar or vector field on the torus held as Fourier coefficients
/// û_k = N^{-n} Σ_x u(x) e^{-ik·x}, so that Σ_k |û_k|² is the L² norm squared
/// under the normalized measure.
class SpectralField {
 public:
  SpectralField(Grid grid, int components);

  const Grid& grid() const { return grid_; }
  int components() const { return static_cast<int>(coeffs_.size()); }

  std::span<Complex> component(int c) { return coeffs_[c]; }
  std::span<const Complex> component(int c) const { return coeffs_[c]; }

  Complex& operator()(int c, std::size_t flat) { return coeffs_[c][flat]; }
  const Complex& operator()(int c, std::size_t flat) const { return coeffs_[c][flat]; }

  /// Coefficient of e^{ik·x}; components of k are wrapped into the lattice.
  Complex& at(int c, const Wavevector& k) { return coeffs_[c][grid_.flat_index(k)]; }
  const Complex& at(int c, const Wavevector& k) const { return coeffs_[c][grid_.flat_index(k)]; }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double factor);

  void set_zero();

  /// max_k |û_{-k} - conj(û_k)| / max_k |û_k|; zero for the zero field.
  double hermitian_defect() const;
  /// Overwrites each pair with its Hermitian average and zeroes Nyquist modes.
  void symmetrize();

  /// True when every mode outside the 2/3-rule box is exactly zero.
  bool is_dealiased() const;
  /// Zeroes every mode with some |k_i| > N/3.
  void dealias();

  /// Largest |û_k| over all components and modes.
  double max_abs() const;

 private:
  Grid grid_;
  std::vector<std::vector<Complex>> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double factor, SpectralField a);

/// A vector field whose divergence has been verified to vanish mode-wise.
/// Instances come from leray_project, from check(), or from mode-wise
/// multipliers that commute with the divergence.
class SolenoidalField {
 public:
  /// Wraps `field` after verifying |k·û_k| ≤ tol·|û_k| on every mode.
  static SolenoidalField check(SpectralField field, double tol = 1e-10);
  /// Wraps without verification. Only for results of operators known to
  /// preserve the divergence-free subspace (Fourier multipliers, projections).
  static SolenoidalField trusted(SpectralField field);

  const SpectralField& field() const { return field_; }
  const Grid& grid() const { return field_.grid(); }
  /// Consumes the wrapper; the result is an ordinary vector field.
  SpectralField release() && { return std::move(field_); }

  operator const SpectralField&() const { return field_; }

 private:
  explicit SolenoidalField(SpectralField f) : field_(std::move(f)) {}
  SpectralField field_;
};

/// max over modes of |k·û_k| / max(|û_k|, 1e-12·max_j|û_j|).
double divergence_defect(const SpectralField& v);

}  // namespace lpmhd
