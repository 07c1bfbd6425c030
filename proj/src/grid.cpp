#include "lpmhd/grid.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "lpmhd/error.hpp"

namespace lpmhd {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid::Grid(int dimension, int points_per_axis) : dim_(dimension), n_(points_per_axis) {
  if (dim_ != 2 && dim_ != 3) {
    throw ParameterError("grid dimension must be 2 or 3, got " + std::to_string(dim_));
  }
  if (!is_power_of_two(n_) || n_ < 16) {
    throw ParameterError("points per axis must be a power of two >= 16, got " + std::to_string(n_));
  }

  // Tables are immutable, so grids of equal shape share one copy.
  static std::mutex cache_mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const Data>> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = cache.find({dim_, n_});
  if (it != cache.end()) {
    data_ = it->second;
    return;
  }

  auto d = std::make_shared<Data>();
  std::size_t total = 1;
  for (int a = 0; a < dim_; ++a) total *= static_cast<std::size_t>(n_);
  d->size = total;
  d->k.resize(total);
  d->k2.resize(total);
  d->kabs.resize(total);
  d->retained.resize(total);
  d->nyquist.resize(total);
  d->conj.resize(total);

  const int cutoff = n_ / 3;
  for (std::size_t flat = 0; flat < total; ++flat) {
    Wavevector k{0, 0, 0};
    std::size_t rem = flat;
    for (int a = dim_ - 1; a >= 0; --a) {
      k[a] = wavenumber(static_cast<int>(rem % n_));
      rem /= n_;
    }
    double k2 = 0.0;
    bool keep = true;
    bool nyq = false;
    for (int a = 0; a < dim_; ++a) {
      k2 += static_cast<double>(k[a]) * k[a];
      if (std::abs(k[a]) > cutoff) keep = false;
      if (k[a] == -n_ / 2) nyq = true;
    }
    d->k[flat] = k;
    d->k2[flat] = k2;
    d->kabs[flat] = std::sqrt(k2);
    d->retained[flat] = keep ? 1 : 0;
    d->nyquist[flat] = nyq ? 1 : 0;
    if (!nyq) d->kmax = std::max(d->kmax, d->kabs[flat]);
    if (keep) d->kmax_retained = std::max(d->kmax_retained, d->kabs[flat]);
  }
  data_ = d;
  for (std::size_t flat = 0; flat < total; ++flat) {
    const Wavevector& k = d->k[flat];
    d->conj[flat] = flat_index({-k[0], -k[1], -k[2]});
  }
  cache.emplace(std::make_pair(dim_, n_), data_);
}

std::size_t Grid::flat_index(const Wavevector& k) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) {
    flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(axis_index(k[a]));
  }
  return flat;
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (a != b) {
    throw GridMismatchError(std::string(where) + ": operands live on different grids");
  }
}

}  // namespace lpmhd
