#include "lpmhd/random_fields.hpp"

#include <cmath>
#include <numbers>

#include "lpmhd/operators.hpp"

namespace lpmhd {

SpectralField random_field(const Grid& grid, const std::function<double(double)>& envelope, Rng& rng,
                           const RandomFieldOptions& options) {
  SpectralField out(grid, options.components);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  for (int c = 0; c < options.components; ++c) {
    auto comp = out.component(c);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const std::size_t j = grid.conjugate_index(i);
      if (j < i || grid.nyquist(i)) continue;
      if (options.dealiased && !grid.retained(i)) continue;
      if (options.zero_mean && grid.k2(i) == 0.0) continue;
      const double amp = envelope(grid.kabs(i));
      Complex z;
      if (options.modulus == Modulus::kGaussian) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        z = Complex(re, im);
      } else {
        z = std::polar(1.0, phase(rng));
      }
      z *= amp;
      if (j == i) z = Complex(z.real(), 0.0);
      comp[i] = z;
      comp[j] = std::conj(z);
    }
  }
  return out;
}

SolenoidalField random_solenoidal(const Grid& grid, const std::function<double(double)>& envelope, Rng& rng,
                                  bool dealiased) {
  RandomFieldOptions opts;
  opts.components = grid.dimension();
  opts.dealiased = dealiased;
  return leray_project(random_field(grid, envelope, rng, opts));
}

std::function<double(double)> power_law_envelope(double slope) {
  return [slope](double k) { return std::pow(1.0 + k, -slope); };
}

}  // namespace lpmhd
