#include "calabi/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>

namespace calabi {

namespace detail {

void* fft_alloc(std::size_t bytes) {
  void* p = fftw_malloc(bytes == 0 ? 1 : bytes);
  if (p == nullptr) throw std::bad_alloc();
  return p;
}

void fft_free(void* p) noexcept { fftw_free(p); }

}  // namespace detail

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

// The FFTW planner is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per grid shape and never destroyed.
// FFTW_ESTIMATE keeps plan choice, and hence round-off, reproducible across
// processes.
const PlanPair& plans_for(const TorusDomain& domain) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, PlanPair> cache;

  std::lock_guard lock(mutex);
  const auto key = std::make_pair(domain.real_dim(), domain.grid_size());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::vector<int> dims(domain.real_dim(), domain.grid_size());
  RealBuffer real(domain.num_points());
  ComplexBuffer spec(domain.num_modes());
  auto* r = real.data();
  auto* c = reinterpret_cast<fftw_complex*>(spec.data());
  PlanPair plans;
  plans.forward = fftw_plan_dft_r2c(domain.real_dim(), dims.data(), r, c, FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
  plans.inverse = fftw_plan_dft_c2r(domain.real_dim(), dims.data(), c, r, FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
  return cache.emplace(key, plans).first->second;
}

template <class T>
bool all_zero(const T& buffer) {
  return std::all_of(buffer.begin(), buffer.end(), [](const auto& v) { return v == decltype(v)(0); });
}

}  // namespace

ComplexBuffer forward_transform(const TorusDomain& domain, const RealBuffer& values) {
  if (values.size() != domain.num_points()) throw DomainError("forward_transform: size mismatch");
  ComplexBuffer out(domain.num_modes());
  if (all_zero(values)) return out;
  const auto& plans = plans_for(domain);
  fftw_execute_dft_r2c(plans.forward, const_cast<double*>(values.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / static_cast<double>(domain.num_points());
  for (auto& c : out) c *= scale;
  return out;
}

RealBuffer inverse_transform(const TorusDomain& domain, const ComplexBuffer& spectrum) {
  if (spectrum.size() != domain.num_modes()) throw DomainError("inverse_transform: size mismatch");
  RealBuffer out(domain.num_points());
  if (all_zero(spectrum)) return out;
  const auto& plans = plans_for(domain);
  ComplexBuffer scratch(spectrum);
  fftw_execute_dft_c2r(plans.inverse, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
  return out;
}

RealBuffer inverse_transform(const TorusDomain& domain, ComplexBuffer&& spectrum) {
  if (spectrum.size() != domain.num_modes()) throw DomainError("inverse_transform: size mismatch");
  RealBuffer out(domain.num_points());
  if (all_zero(spectrum)) return out;
  const auto& plans = plans_for(domain);
  fftw_execute_dft_c2r(plans.inverse, reinterpret_cast<fftw_complex*>(spectrum.data()), out.data());
  return out;
}

}  // namespace calabi
