#pragma once

#include <span>
#include <vector>

#include "lpmhd/grid.hpp"
#include "lpmhd/spectral_field.hpp"

namespace lpmhd {

/// Spectral → physical: u(x_j) = Σ_k û_k e^{ik·x_j}. Plans are cached per
/// grid shape; execution is safe from multiple threads.
void inverse_transform(const Grid& grid, std::span<const Complex> spectral, std::span<Complex> physical);

/// Physical → spectral with the N^{-n} normalization.
void forward_transform(const Grid& grid, std::span<const Complex> physical, std::span<Complex> spectral);

PhysicalField to_physical(const SpectralField& field);
std::vector<double> to_physical(const SpectralField& field, int component);
SpectralField to_spectral(const Grid& grid, const PhysicalField& physical);

/// Samples of the band-limited interpolant on a grid `factor` times finer
/// (zero-padded spectrum). Nyquist modes of the source are ignored.
PhysicalField to_physical_oversampled(const SpectralField& field, int factor = 2);

}  // namespace lpmhd
