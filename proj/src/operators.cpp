#include "lpmhd/operators.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "lpmhd/error.hpp"
#include "lpmhd/fft.hpp"

namespace lpmhd {

namespace {

constexpr double kHermitianTolerance = 1e-10;

void require_vector(const SpectralField& v, const char* where) {
  if (v.components() != v.grid().dimension()) {
    throw ParameterError(std::string(where) + ": expected a vector field");
  }
}

}  // namespace

SolenoidalField leray_project(const SpectralField& v) {
  require_vector(v, "leray_project");
  const double defect = v.hermitian_defect();
  if (defect > kHermitianTolerance) {
    std::ostringstream msg;
    msg << "leray_project: input is not Hermitian-symmetric (defect " << defect << ")";
    throw SymmetryError(msg.str());
  }
  SpectralField out = v;
  leray_project_in_place(out);
  return SolenoidalField::trusted(std::move(out));
}

void leray_project_in_place(SpectralField& v) {
  require_vector(v, "leray_project");
  const Grid& g = v.grid();
  const int n = g.dimension();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double k2 = g.k2(i);
    if (k2 == 0.0) continue;
    const Wavevector& k = g.wavevector(i);
    Complex dot{};
    for (int c = 0; c < n; ++c) dot += static_cast<double>(k[c]) * v(c, i);
    const Complex coef = dot / k2;
    for (int c = 0; c < n; ++c) v(c, i) -= static_cast<double>(k[c]) * coef;
  }
}

SpectralField fractional_laplacian(const SpectralField& u, double alpha) {
  if (!(alpha > 0.0)) throw ParameterError("fractional_laplacian: order must be positive");
  return apply_radial_multiplier(u, [alpha](double k2) { return k2 == 0.0 ? 0.0 : std::pow(k2, alpha); });
}

SpectralField gradient(const SpectralField& u) {
  const Grid& g = u.grid();
  const int n = g.dimension();
  SpectralField out(g, u.components() * n);
  for (int c = 0; c < u.components(); ++c) {
    for (int j = 0; j < n; ++j) {
      auto dst = out.component(c * n + j);
      auto src = u.component(c);
      for (std::size_t i = 0; i < g.size(); ++i) {
        dst[i] = Complex(-g.wavevector(i)[j] * src[i].imag(), g.wavevector(i)[j] * src[i].real());
      }
    }
  }
  return out;
}

SpectralField divergence(const SpectralField& v) {
  require_vector(v, "divergence");
  const Grid& g = v.grid();
  SpectralField out(g, 1);
  auto dst = out.component(0);
  for (int j = 0; j < g.dimension(); ++j) {
    auto src = v.component(j);
    for (std::size_t i = 0; i < g.size(); ++i) {
      dst[i] += Complex(-g.wavevector(i)[j] * src[i].imag(), g.wavevector(i)[j] * src[i].real());
    }
  }
  return out;
}

SpectralField transport(const SpectralField& a, const SpectralField& v) {
  require_vector(a, "transport");
  require_same_grid(a.grid(), v.grid(), "transport");
  const Grid& g = a.grid();
  const int n = g.dimension();
  const std::size_t size = g.size();

  std::vector<std::vector<double>> a_phys(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) a_phys[j] = to_physical(a, j);

  SpectralField out(g, v.components());
  std::vector<Complex> deriv(size), work(size), acc(size);
  for (int c = 0; c < v.components(); ++c) {
    std::fill(acc.begin(), acc.end(), Complex{});
    auto src = v.component(c);
    for (int j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < size; ++i) {
        deriv[i] = Complex(-g.wavevector(i)[j] * src[i].imag(), g.wavevector(i)[j] * src[i].real());
      }
      inverse_transform(g, deriv, work);
      const auto& aj = a_phys[j];
      for (std::size_t i = 0; i < size; ++i) acc[i] += aj[i] * work[i].real();
    }
    forward_transform(g, acc, out.component(c));
  }
  out.dealias();
  return out;
}

SpectralField advect(const SolenoidalField& u, const SpectralField& v) { return transport(u.field(), v); }

double inner_product(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid(), g.grid(), "inner_product");
  if (f.components() != g.components()) throw ParameterError("inner_product: component mismatch");
  double sum = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    auto a = f.component(c);
    auto b = g.component(c);
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  }
  return sum;
}

double l2_norm(const SpectralField& u) { return std::sqrt(inner_product(u, u)); }

double sobolev_norm_direct(const SpectralField& u, double s, bool homogeneous) {
  const Grid& g = u.grid();
  double sum = 0.0;
  for (int c = 0; c < u.components(); ++c) {
    auto comp = u.component(c);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double k2 = g.k2(i);
      double w;
      if (homogeneous) {
        if (k2 == 0.0) continue;
        w = std::pow(k2, s);
      } else {
        w = std::pow(1.0 + k2, s);
      }
      sum += w * std::norm(comp[i]);
    }
  }
  return std::sqrt(sum);
}

namespace {

double pointwise_max(const PhysicalField& phys) {
  const std::size_t size = phys.components.front().size();
  double m = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    double mag2 = 0.0;
    for (const auto& comp : phys.components) mag2 += comp[i] * comp[i];
    m = std::max(m, mag2);
  }
  return std::sqrt(m);
}

}  // namespace

double linf_norm(const SpectralField& u) { return pointwise_max(to_physical(u)); }

double lp_norm(const SpectralField& u, double p, int oversample) {
  if (!(p >= 1.0)) throw ParameterError("lp_norm: exponent must be >= 1");
  const PhysicalField phys = to_physical_oversampled(u, oversample);
  if (std::isinf(p)) return pointwise_max(phys);
  const std::size_t size = phys.components.front().size();
  double sum = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    double mag2 = 0.0;
    for (const auto& comp : phys.components) mag2 += comp[i] * comp[i];
    sum += std::pow(mag2, 0.5 * p);
  }
  return std::pow(sum / static_cast<double>(size), 1.0 / p);
}

double gradient_linf_norm(const SpectralField& u) { return linf_norm(gradient(u)); }

}  // namespace lpmhd
