#pragma once

#include <complex>
#include <cstddef>
#include <new>
#include <vector>

#include "calabi/domain.hpp"

namespace calabi {

namespace detail {
void* fft_alloc(std::size_t bytes);
void fft_free(void* p) noexcept;
}  // namespace detail

/// Allocator returning SIMD-aligned storage so any buffer can be handed to
/// a cached transform plan.
template <class T>
struct FftAllocator {
  using value_type = T;

  FftAllocator() noexcept = default;
  template <class U>
  FftAllocator(const FftAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) { return static_cast<T*>(detail::fft_alloc(n * sizeof(T))); }
  void deallocate(T* p, std::size_t) noexcept { detail::fft_free(p); }

  template <class U>
  bool operator==(const FftAllocator<U>&) const noexcept {
    return true;
  }
};

using RealBuffer = std::vector<double, FftAllocator<double>>;
using ComplexBuffer = std::vector<std::complex<double>, FftAllocator<std::complex<double>>>;

/// Forward real-to-half-spectrum transform normalized by 1/num_points, so
/// f(x) = Σ_k c_k exp(i κ·x).
ComplexBuffer forward_transform(const TorusDomain& domain, const RealBuffer& values);

/// Inverse of forward_transform. The input is left untouched.
RealBuffer inverse_transform(const TorusDomain& domain, const ComplexBuffer& spectrum);
/// Same, reusing `spectrum` as transform scratch (its contents are destroyed).
RealBuffer inverse_transform(const TorusDomain& domain, ComplexBuffer&& spectrum);

/// Multiplicity of a half-spectrum coefficient in the full spectrum: 1 on
/// the self-conjugate planes (last frequency 0 or N/2), 2 elsewhere.
inline double hermitian_weight(const TorusDomain& domain, int last_frequency) {
  return (last_frequency == 0 || last_frequency == domain.grid_size() / 2) ? 1.0 : 2.0;
}

}  // namespace calabi
