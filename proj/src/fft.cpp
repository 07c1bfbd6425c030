#include "lpmhd/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "lpmhd/error.hpp"

namespace lpmhd {

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Plans live for the whole process; FFTW's planner is not thread-safe, so
// creation is serialized. Execution through fftw_execute_dft is reentrant.
const PlanPair& plans_for(const Grid& grid) {
  static std::map<std::pair<int, int>, PlanPair> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  const auto key = std::make_pair(grid.dimension(), grid.points());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  int dims[3] = {grid.points(), grid.points(), grid.points()};
  std::vector<Complex> a(grid.size()), b(grid.size());
  auto* in = reinterpret_cast<fftw_complex*>(a.data());
  auto* out = reinterpret_cast<fftw_complex*>(b.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.forward = fftw_plan_dft(grid.dimension(), dims, in, out, FFTW_FORWARD, flags);
  p.backward = fftw_plan_dft(grid.dimension(), dims, in, out, FFTW_BACKWARD, flags);
  if (p.forward == nullptr || p.backward == nullptr) {
    throw NumericalError("FFTW planning failed");
  }
  return cache.emplace(key, p).first->second;
}

}  // namespace

void inverse_transform(const Grid& grid, std::span<const Complex> spectral, std::span<Complex> physical) {
  const PlanPair& p = plans_for(grid);
  // Out-of-place complex transforms leave the input untouched.
  auto* in = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(spectral.data()));
  fftw_execute_dft(p.backward, in, reinterpret_cast<fftw_complex*>(physical.data()));
}

void forward_transform(const Grid& grid, std::span<const Complex> physical, std::span<Complex> spectral) {
  const PlanPair& p = plans_for(grid);
  auto* in = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(physical.data()));
  fftw_execute_dft(p.forward, in, reinterpret_cast<fftw_complex*>(spectral.data()));
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& z : spectral) z *= scale;
}

std::vector<double> to_physical(const SpectralField& field, int component) {
  const Grid& g = field.grid();
  std::vector<Complex> work(g.size());
  inverse_transform(g, field.component(component), work);
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = work[i].real();
  return out;
}

PhysicalField to_physical(const SpectralField& field) {
  PhysicalField out;
  out.components.reserve(static_cast<std::size_t>(field.components()));
  for (int c = 0; c < field.components(); ++c) out.components.push_back(to_physical(field, c));
  return out;
}

SpectralField to_spectral(const Grid& grid, const PhysicalField& physical) {
  SpectralField out(grid, static_cast<int>(physical.components.size()));
  std::vector<Complex> work(grid.size());
  for (int c = 0; c < out.components(); ++c) {
    const auto& src = physical.components[c];
    if (src.size() != grid.size()) throw ParameterError("physical samples do not match grid size");
    for (std::size_t i = 0; i < work.size(); ++i) work[i] = Complex(src[i], 0.0);
    forward_transform(grid, work, out.component(c));
  }
  return out;
}

PhysicalField to_physical_oversampled(const SpectralField& field, int factor) {
  if (factor < 1) throw ParameterError("oversampling factor must be positive");
  const Grid& g = field.grid();
  const Grid fine(g.dimension(), g.points() * factor);
  PhysicalField out;
  std::vector<Complex> padded(fine.size());
  std::vector<Complex> work(fine.size());
  for (int c = 0; c < field.components(); ++c) {
    std::fill(padded.begin(), padded.end(), Complex{});
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.nyquist(i)) continue;
      padded[fine.flat_index(g.wavevector(i))] = field(c, i);
    }
    inverse_transform(fine, padded, work);
    std::vector<double> re(fine.size());
    for (std::size_t i = 0; i < re.size(); ++i) re[i] = work[i].real();
    out.components.push_back(std::move(re));
  }
  return out;
}

}  // namespace lpmhd
