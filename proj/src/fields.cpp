#include "calabi/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace calabi {

namespace {

double neumaier_sum(const RealBuffer& v) {
  double sum = 0.0;
  double carry = 0.0;
  for (double x : v) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

void validate_wavevector(const TorusDomain& domain, std::span<const int> k) {
  if (static_cast<int>(k.size()) != domain.real_dim())
    throw DomainError("wavevector needs " + std::to_string(domain.real_dim()) + " components, got " +
                      std::to_string(k.size()));
  for (int c : k) {
    if (std::abs(c) >= domain.grid_size() / 2)
      throw DomainError("wavevector component " + std::to_string(c) + " is not resolved by N = " +
                        std::to_string(domain.grid_size()));
  }
}

}  // namespace

ScalarField::ScalarField(const TorusDomain& domain, RealBuffer values)
    : domain_(domain), values_(std::move(values)) {
  if (values_.size() != domain_.num_points()) throw DomainError("ScalarField: value count does not match the grid");
}

ScalarField ScalarField::constant(const TorusDomain& domain, double value) {
  ScalarField f(domain);
  std::fill(f.values_.begin(), f.values_.end(), value);
  return f;
}

double ScalarField::sup_abs() const {
  double s = 0.0;
  for (double v : values_) s = std::max(s, std::abs(v));
  return s;
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double ScalarField::mean() const { return neumaier_sum(values_) / static_cast<double>(values_.size()); }

PotentialField PotentialField::from_values(ScalarField values) {
  auto spectrum = forward_transform(values.domain(), values.values());
  return PotentialField(std::move(values), std::move(spectrum));
}

PotentialField PotentialField::from_spectrum(const TorusDomain& domain, ComplexBuffer spectrum) {
  ScalarField values(domain, inverse_transform(domain, spectrum));
  return PotentialField(std::move(values), std::move(spectrum));
}

PotentialField PotentialField::zero(const TorusDomain& domain) {
  return PotentialField(ScalarField(domain), ComplexBuffer(domain.num_modes()));
}

std::complex<double> PotentialField::coefficient(std::span<const int> k) const {
  validate_wavevector(domain(), k);
  const std::size_t q = domain().flat_mode(k);
  if (q != TorusDomain::npos) return spectrum_[q];
  std::vector<int> neg(k.begin(), k.end());
  for (int& c : neg) c = -c;
  return std::conj(spectrum_[domain().flat_mode(neg)]);
}

double PotentialField::cosine_amplitude(std::span<const int> k) const {
  const bool is_zero = std::all_of(k.begin(), k.end(), [](int c) { return c == 0; });
  const auto c = coefficient(k);
  return is_zero ? c.real() : 2.0 * c.real();
}

PotentialField potential_from_modes(const TorusDomain& domain, std::span<const Mode> modes) {
  ComplexBuffer spectrum(domain.num_modes());
  const int last = domain.real_dim() - 1;
  for (const auto& mode : modes) {
    validate_wavevector(domain, mode.wavevector);
    const auto& k = mode.wavevector;
    const bool is_zero = std::all_of(k.begin(), k.end(), [](int c) { return c == 0; });
    if (is_zero) {
      spectrum[0] += mode.amplitude * std::cos(mode.phase);
      continue;
    }
    // a cos(κx + ψ) = (a/2) e^{iψ} e^{iκx} + (a/2) e^{-iψ} e^{-iκx}
    const auto half = 0.5 * mode.amplitude * std::polar(1.0, mode.phase);
    std::vector<int> neg(k.begin(), k.end());
    for (int& c : neg) c = -c;
    if (k[last] > 0) {
      spectrum[domain.flat_mode(k)] += half;
    } else if (k[last] < 0) {
      spectrum[domain.flat_mode(neg)] += std::conj(half);
    } else {
      spectrum[domain.flat_mode(k)] += half;
      spectrum[domain.flat_mode(neg)] += std::conj(half);
    }
  }
  return PotentialField::from_spectrum(domain, std::move(spectrum));
}

PotentialField mean_normalize(const PotentialField& phi) {
  ComplexBuffer spectrum = phi.spectrum();
  spectrum[0] = 0.0;
  return PotentialField::from_spectrum(phi.domain(), std::move(spectrum));
}

double hessian_bound(const TorusDomain& domain, std::span<const Mode> modes) {
  double bound = 0.0;
  for (const auto& mode : modes) {
    double kappa_sq = 0.0;
    for (int a = 0; a < domain.real_dim(); ++a) {
      const double kappa = 2.0 * std::numbers::pi * mode.wavevector.at(a) / domain.period(a);
      kappa_sq += kappa * kappa;
    }
    bound += 0.25 * kappa_sq * std::abs(mode.amplitude);
  }
  return bound;
}

std::vector<Mode> sample_analytic_modes(const TorusDomain& domain, std::mt19937_64& rng,
                                        const AnalyticSampleOptions& options) {
  const int kmax = std::min(options.max_wavenumber, domain.grid_size() / 2 - 1);
  if (kmax < 1) throw DomainError("sample_analytic_modes: max_wavenumber must be >= 1");
  std::uniform_int_distribution<int> pick_k(-kmax, kmax);
  std::uniform_real_distribution<double> pick_unit(0.0, 1.0);

  std::vector<Mode> modes;
  modes.reserve(options.num_modes);
  while (static_cast<int>(modes.size()) < options.num_modes) {
    Mode m;
    m.wavevector.resize(domain.real_dim());
    for (int& c : m.wavevector) c = pick_k(rng);
    if (std::all_of(m.wavevector.begin(), m.wavevector.end(), [](int c) { return c == 0; })) continue;
    m.amplitude = options.max_amplitude * (1.0 - pick_unit(rng));  // (0, max]
    m.phase = 2.0 * std::numbers::pi * pick_unit(rng);
    modes.push_back(std::move(m));
  }
  const double bound = hessian_bound(domain, modes);
  if (bound > options.max_hessian) {
    const double scale = options.max_hessian / bound;
    for (auto& m : modes) m.amplitude *= scale;
  }
  return modes;
}

double spectral_tail_fraction(const TorusDomain& domain, const ComplexBuffer& spectrum) {
  const int cutoff = domain.grid_size() / 3;
  const int last = domain.real_dim() - 1;
  double total = 0.0;
  double tail = 0.0;
  for_each_mode(domain, [&](std::size_t q, const GridIndex& f) {
    if (q == 0) return;
    const double e = hermitian_weight(domain, f[last]) * std::norm(spectrum[q]);
    total += e;
    int top = 0;
    for (int a = 0; a <= last; ++a) top = std::max(top, std::abs(f[a]));
    if (top > cutoff) tail += e;
  });
  return total > 0.0 ? tail / total : 0.0;
}

}  // namespace calabi
