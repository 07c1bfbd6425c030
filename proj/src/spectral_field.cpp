#include "lpmhd/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "lpmhd/error.hpp"

namespace lpmhd {

SpectralField::SpectralField(Grid grid, int components) : grid_(std::move(grid)) {
  if (components < 1) throw ParameterError("field needs at least one component");
  coeffs_.assign(static_cast<std::size_t>(components), std::vector<Complex>(grid_.size()));
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_grid(grid_, other.grid_, "SpectralField +=");
  if (components() != other.components()) throw ParameterError("component count mismatch in +=");
  for (int c = 0; c < components(); ++c) {
    auto& a = coeffs_[c];
    const auto& b = other.coeffs_[c];
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  }
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_grid(grid_, other.grid_, "SpectralField -=");
  if (components() != other.components()) throw ParameterError("component count mismatch in -=");
  for (int c = 0; c < components(); ++c) {
    auto& a = coeffs_[c];
    const auto& b = other.coeffs_[c];
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  }
  return *this;
}

SpectralField& SpectralField::operator*=(double factor) {
  for (auto& comp : coeffs_) {
    for (auto& z : comp) z *= factor;
  }
  return *this;
}

void SpectralField::set_zero() {
  for (auto& comp : coeffs_) std::fill(comp.begin(), comp.end(), Complex{});
}

double SpectralField::hermitian_defect() const {
  const double scale = max_abs();
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (const auto& comp : coeffs_) {
    for (std::size_t i = 0; i < comp.size(); ++i) {
      const std::size_t j = grid_.conjugate_index(i);
      worst = std::max(worst, std::abs(comp[j] - std::conj(comp[i])));
    }
  }
  return worst / scale;
}

void SpectralField::symmetrize() {
  for (auto& comp : coeffs_) {
    for (std::size_t i = 0; i < comp.size(); ++i) {
      if (grid_.nyquist(i)) {
        comp[i] = Complex{};
        continue;
      }
      const std::size_t j = grid_.conjugate_index(i);
      if (j < i) continue;
      if (j == i) {
        comp[i] = Complex(comp[i].real(), 0.0);
        continue;
      }
      const Complex avg = 0.5 * (comp[i] + std::conj(comp[j]));
      comp[i] = avg;
      comp[j] = std::conj(avg);
    }
  }
}

bool SpectralField::is_dealiased() const {
  for (const auto& comp : coeffs_) {
    for (std::size_t i = 0; i < comp.size(); ++i) {
      if (!grid_.retained(i) && comp[i] != Complex{}) return false;
    }
  }
  return true;
}

void SpectralField::dealias() {
  for (auto& comp : coeffs_) {
    for (std::size_t i = 0; i < comp.size(); ++i) {
      if (!grid_.retained(i)) comp[i] = Complex{};
    }
  }
}

double SpectralField::max_abs() const {
  double m = 0.0;
  for (const auto& comp : coeffs_) {
    for (const auto& z : comp) m = std::max(m, std::abs(z));
  }
  return m;
}

SpectralField operator+(SpectralField a, const SpectralField& b) {
  a += b;
  return a;
}

SpectralField operator-(SpectralField a, const SpectralField& b) {
  a -= b;
  return a;
}

SpectralField operator*(double factor, SpectralField a) {
  a *= factor;
  return a;
}

double divergence_defect(const SpectralField& v) {
  const Grid& g = v.grid();
  if (v.components() != g.dimension()) {
    throw ParameterError("divergence defect needs a vector field");
  }
  const double floor = 1e-12 * v.max_abs();
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Wavevector& k = g.wavevector(i);
    Complex dot{};
    double mag2 = 0.0;
    for (int c = 0; c < g.dimension(); ++c) {
      dot += static_cast<double>(k[c]) * v(c, i);
      mag2 += std::norm(v(c, i));
    }
    const double denom = std::max(std::sqrt(mag2), floor);
    if (denom == 0.0) continue;
    worst = std::max(worst, std::abs(dot) / denom);
  }
  return worst;
}

SolenoidalField SolenoidalField::check(SpectralField field, double tol) {
  const double defect = divergence_defect(field);
  if (defect > tol) {
    std::ostringstream msg;
    msg << "field is not divergence-free: defect " << defect << " exceeds " << tol;
    throw ParameterError(msg.str());
  }
  return SolenoidalField(std::move(field));
}

SolenoidalField SolenoidalField::trusted(SpectralField field) {
  if (field.components() != field.grid().dimension()) {
    throw ParameterError("solenoidal field must have one component per dimension");
  }
  return SolenoidalField(std::move(field));
}

}  // namespace lpmhd
