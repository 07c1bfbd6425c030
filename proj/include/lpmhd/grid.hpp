#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

namespace lpmhd {

using Wavevector = std::array<int, 3>;

/// Collocation grid on the 2π-periodic n-torus, n ∈ {2, 3}, with N points per
/// axis. Spectral arrays are full (not half-spectrum) and stored row-major in
/// FFT order: axis index i carries wavenumber i for i < N/2 and i − N above.
///
/// Per-mode tables (wavevectors, |k|², dealiasing mask, index of −k) are built
/// once and shared between copies.
class Grid {
 public:
  Grid(int dimension, int points_per_axis);

  int dimension() const { return dim_; }
  int points() const { return n_; }
  std::size_t size() const { return data_->size; }

  /// Highest retained wavenumber per axis after 2/3-rule truncation.
  int dealias_cutoff() const { return n_ / 3; }

  int wavenumber(int axis_index) const { return axis_index < n_ / 2 ? axis_index : axis_index - n_; }
  int axis_index(int wavenumber) const { return ((wavenumber % n_) + n_) % n_; }

  const Wavevector& wavevector(std::size_t flat) const { return data_->k[flat]; }
  double k2(std::size_t flat) const { return data_->k2[flat]; }
  double kabs(std::size_t flat) const { return data_->kabs[flat]; }
  /// True when every |k_i| ≤ N/3.
  bool retained(std::size_t flat) const { return data_->retained[flat] != 0; }
  /// True when some k_i = −N/2 (a mode with no distinct conjugate partner).
  bool nyquist(std::size_t flat) const { return data_->nyquist[flat] != 0; }
  std::size_t conjugate_index(std::size_t flat) const { return data_->conj[flat]; }

  /// Flat index of wavevector k (components wrapped into the lattice).
  std::size_t flat_index(const Wavevector& k) const;

  /// Largest |k| over non-Nyquist lattice modes.
  double max_wavenumber() const { return data_->kmax; }
  double max_retained_wavenumber() const { return data_->kmax_retained; }

  bool operator==(const Grid& other) const { return dim_ == other.dim_ && n_ == other.n_; }
  bool operator!=(const Grid& other) const { return !(*this == other); }

 private:
  struct Data {
    std::size_t size = 0;
    std::vector<Wavevector> k;
    std::vector<double> k2;
    std::vector<double> kabs;
    std::vector<unsigned char> retained;
    std::vector<unsigned char> nyquist;
    std::vector<std::size_t> conj;
    double kmax = 0.0;
    double kmax_retained = 0.0;
  };

  int dim_;
  int n_;
  std::shared_ptr<const Data> data_;
};

/// Throws GridMismatchError when the grids differ.
void require_same_grid(const Grid& a, const Grid& b, const char* where);

}  // namespace lpmhd
