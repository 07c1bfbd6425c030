#pragma once

#include <functional>
#include <random>

#include "lpmhd/spectral_field.hpp"

namespace lpmhd {

using Rng = std::mt19937_64;

enum class Modulus {
  kGaussian,  // complex Gaussian amplitude, so |û_k| fluctuates around the envelope
  kUnit,      // |û_k| equals the envelope exactly, only the phase is random
};

struct RandomFieldOptions {
  int components = 1;
  Modulus modulus = Modulus::kGaussian;
  bool dealiased = true;
  bool zero_mean = true;
};

/// Real random field with û_k = envelope(|k|)·ξ_k, ξ_k drawn for one member of
/// each ±k pair and conjugated onto the other. Nyquist modes are zero.
SpectralField random_field(const Grid& grid, const std::function<double(double)>& envelope, Rng& rng,
                           const RandomFieldOptions& options = {});

/// Divergence-free random vector field (Leray projection of random_field).
SolenoidalField random_solenoidal(const Grid& grid, const std::function<double(double)>& envelope, Rng& rng,
                                  bool dealiased = true);

/// Envelope (1+|k|)^{-slope}.
std::function<double(double)> power_law_envelope(double slope);

}  // namespace lpmhd
