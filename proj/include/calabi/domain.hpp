#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "calabi/errors.hpp"

namespace calabi {

/// Maximum real dimension of a torus (complex dimension 2).
inline constexpr int kMaxRealDim = 4;

using GridIndex = std::array<int, kMaxRealDim>;

/// A flat complex torus C^n / lattice with a uniform tensor grid.
///
/// Real axes are ordered (x_1, y_1, x_2, y_2) with z_j = x_j + i y_j. The
/// grid is stored row-major with the last real axis varying fastest; the
/// half-spectrum layout halves that last axis (N/2 + 1 entries).
///
/// The background metric is the identity g_{ij̄} = δ_{ij̄} in the convention
/// ω = (√-1/2) g_{ij̄} dz^i ∧ dz̄^j, so ωⁿ = n!·det(g)·dx∧dy and the
/// background volume is n!·∏periods.
class TorusDomain {
 public:
  int complex_dim() const noexcept { return n_; }
  int real_dim() const noexcept { return 2 * n_; }
  int grid_size() const noexcept { return grid_size_; }
  std::span<const double> periods() const noexcept { return periods_; }
  double period(int axis) const { return periods_.at(axis); }
  double background_volume() const noexcept { return volume_; }

  /// N^{2n} grid points.
  std::size_t num_points() const noexcept { return num_points_; }
  /// N^{2n-1}·(N/2+1) half-spectrum coefficients.
  std::size_t num_modes() const noexcept { return num_modes_; }
  /// Extent of the (halved) last axis in spectral layout.
  int half_extent() const noexcept { return grid_size_ / 2 + 1; }

  /// Signed integer frequency stored at position i along a full axis.
  int frequency(int i) const noexcept { return i <= grid_size_ / 2 ? i : i - grid_size_; }

  /// Angular wavenumber 2π f / period used by spectral derivatives. The
  /// Nyquist frequency is mapped to zero so odd derivatives stay real.
  double derivative_wavenumber(int axis, int frequency) const;

  double coordinate(int axis, int i) const;

  GridIndex point_index(std::size_t flat) const;
  std::size_t flat_point(const GridIndex& idx) const;

  /// Flat half-spectrum index of a wavevector, or npos when it lives in the
  /// conjugate half (negative last component).
  std::size_t flat_mode(std::span<const int> wavevector) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  friend bool operator==(const TorusDomain&, const TorusDomain&) = default;

 private:
  TorusDomain(int n, int grid_size, std::vector<double> periods);
  friend TorusDomain make_domain(int, int, std::vector<double>);

  int n_ = 1;
  int grid_size_ = 8;
  std::vector<double> periods_;
  double volume_ = 1.0;
  std::size_t num_points_ = 0;
  std::size_t num_modes_ = 0;
};

/// Build a torus of complex dimension n ∈ {1, 2} with N points per real axis.
/// An empty period list means unit periods on every axis.
/// Throws DomainError on N not a power of two or N < 8, nonpositive
/// periods, a period list of the wrong length, or n ∉ {1, 2}.
TorusDomain make_domain(int n, int grid_size, std::vector<double> periods = {});

void require_same_domain(const TorusDomain& a, const TorusDomain& b, const char* what);

/// Visit every half-spectrum coefficient in storage order. The callback
/// receives the flat index and the signed frequency of each real axis.
template <class Fn>
void for_each_mode(const TorusDomain& domain, Fn&& fn) {
  const int dim = domain.real_dim();
  const int full = domain.grid_size();
  const int half = domain.half_extent();
  GridIndex pos{};
  GridIndex freq{};
  std::size_t q = 0;
  const std::size_t total = domain.num_modes();
  while (q < total) {
    for (int a = 0; a < dim; ++a) freq[a] = a == dim - 1 ? pos[a] : domain.frequency(pos[a]);
    fn(q, freq);
    ++q;
    for (int a = dim - 1; a >= 0; --a) {
      const int extent = a == dim - 1 ? half : full;
      if (++pos[a] < extent) break;
      pos[a] = 0;
    }
  }
}

}  // namespace calabi
