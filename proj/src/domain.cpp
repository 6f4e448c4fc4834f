#include "calabi/domain.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace calabi {

NotKahlerError::NotKahlerError(double min_eigenvalue, std::size_t point)
    : std::runtime_error("metric is not Kähler: smallest eigenvalue " + std::to_string(min_eigenvalue) +
                         " at grid point " + std::to_string(point)),
      min_eigenvalue_(min_eigenvalue),
      point_(point) {}

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

TorusDomain::TorusDomain(int n, int grid_size, std::vector<double> periods)
    : n_(n), grid_size_(grid_size), periods_(std::move(periods)) {
  double factorial = n == 2 ? 2.0 : 1.0;
  volume_ = factorial;
  for (double p : periods_) volume_ *= p;
  num_points_ = 1;
  for (int a = 0; a < 2 * n; ++a) num_points_ *= static_cast<std::size_t>(grid_size);
  num_modes_ = num_points_ / static_cast<std::size_t>(grid_size) * static_cast<std::size_t>(grid_size / 2 + 1);
}

TorusDomain make_domain(int n, int grid_size, std::vector<double> periods) {
  if (n != 1 && n != 2) throw DomainError("complex dimension must be 1 or 2, got " + std::to_string(n));
  if (grid_size < 8 || !is_power_of_two(grid_size))
    throw DomainError("grid size must be a power of two >= 8, got " + std::to_string(grid_size));
  if (periods.empty()) periods.assign(2 * n, 1.0);
  if (static_cast<int>(periods.size()) != 2 * n)
    throw DomainError("expected " + std::to_string(2 * n) + " periods, got " + std::to_string(periods.size()));
  for (double p : periods) {
    if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("periods must be positive and finite");
  }
  return TorusDomain(n, grid_size, std::move(periods));
}

void require_same_domain(const TorusDomain& a, const TorusDomain& b, const char* what) {
  if (!(a == b)) throw DomainError(std::string(what) + ": fields live on different domains");
}

double TorusDomain::derivative_wavenumber(int axis, int frequency) const {
  if (frequency == grid_size_ / 2 || frequency == -grid_size_ / 2) return 0.0;
  return 2.0 * std::numbers::pi * frequency / periods_[axis];
}

double TorusDomain::coordinate(int axis, int i) const {
  return periods_[axis] * static_cast<double>(i) / grid_size_;
}

GridIndex TorusDomain::point_index(std::size_t flat) const {
  GridIndex idx{};
  const auto n = static_cast<std::size_t>(grid_size_);
  for (int a = real_dim() - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % n);
    flat /= n;
  }
  return idx;
}

std::size_t TorusDomain::flat_point(const GridIndex& idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < real_dim(); ++a) flat = flat * grid_size_ + static_cast<std::size_t>(idx[a]);
  return flat;
}

std::size_t TorusDomain::flat_mode(std::span<const int> k) const {
  const int dim = real_dim();
  if (static_cast<int>(k.size()) != dim) throw DomainError("wavevector has wrong length");
  if (k[dim - 1] < 0) return npos;
  std::size_t flat = 0;
  for (int a = 0; a < dim; ++a) {
    if (a == dim - 1) {
      flat = flat * static_cast<std::size_t>(half_extent()) + static_cast<std::size_t>(k[a]);
    } else {
      const int wrapped = k[a] >= 0 ? k[a] : k[a] + grid_size_;
      flat = flat * static_cast<std::size_t>(grid_size_) + static_cast<std::size_t>(wrapped);
    }
  }
  return flat;
}

}  // namespace calabi
