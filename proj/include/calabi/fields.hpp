#pragma once

#include <complex>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "calabi/domain.hpp"
#include "calabi/fft.hpp"

namespace calabi {

/// A real scalar field sampled on the grid.
class ScalarField {
 public:
  explicit ScalarField(const TorusDomain& domain) : domain_(domain), values_(domain.num_points()) {}
  ScalarField(const TorusDomain& domain, RealBuffer values);

  static ScalarField constant(const TorusDomain& domain, double value);

  const TorusDomain& domain() const noexcept { return domain_; }
  std::size_t size() const noexcept { return values_.size(); }
  const RealBuffer& values() const noexcept { return values_; }
  RealBuffer& values() noexcept { return values_; }
  double operator[](std::size_t p) const { return values_[p]; }
  double& operator[](std::size_t p) { return values_[p]; }

  double sup_abs() const;
  double min() const;
  double max() const;
  /// Grid average with compensated summation.
  double mean() const;

 private:
  TorusDomain domain_;
  RealBuffer values_;
};

/// One cosine mode a·cos(2π k·x/periods + phase).
struct Mode {
  std::vector<int> wavevector;
  double amplitude = 0.0;
  double phase = 0.0;

  friend bool operator==(const Mode&, const Mode&) = default;
};

/// A real Kähler potential with its grid values and half spectrum in sync.
class PotentialField {
 public:
  static PotentialField from_values(ScalarField values);
  static PotentialField from_spectrum(const TorusDomain& domain, ComplexBuffer spectrum);
  static PotentialField zero(const TorusDomain& domain);

  const TorusDomain& domain() const noexcept { return values_.domain(); }
  const ScalarField& values() const noexcept { return values_; }
  const ComplexBuffer& spectrum() const noexcept { return spectrum_; }

  /// Normalized Fourier coefficient c_k of exp(i κ·x); any integer
  /// wavevector with |k_a| < N/2 (the conjugate half is reconstructed).
  std::complex<double> coefficient(std::span<const int> wavevector) const;

  /// Amplitude a of the a·cos(κ·x) component: 2 Re c_k for k ≠ 0, c_0 for k = 0.
  double cosine_amplitude(std::span<const int> wavevector) const;

 private:
  PotentialField(ScalarField values, ComplexBuffer spectrum)
      : values_(std::move(values)), spectrum_(std::move(spectrum)) {}

  ScalarField values_;
  ComplexBuffer spectrum_;
};

/// φ(x) = Σ a cos(2π k·x/periods + phase), built in spectral space.
/// Throws DomainError for wavevectors of the wrong length or with
/// |k_a| ≥ N/2 on any axis (aliased or Nyquist).
PotentialField potential_from_modes(const TorusDomain& domain, std::span<const Mode> modes);

/// φ − φ̲ where φ̲ is the average of φ against the flat background volume
/// form. The zero mode is removed in spectral space, so the result has mean
/// zero to round-off and an unchanged Hessian.
PotentialField mean_normalize(const PotentialField& phi);

/// Sum over modes of a·|κ|²/4, an upper bound on the operator norm of ∂∂̄φ.
double hessian_bound(const TorusDomain& domain, std::span<const Mode> modes);

struct AnalyticSampleOptions {
  int num_modes = 3;
  int max_wavenumber = 2;
  double max_amplitude = 1e-2;
  /// Amplitudes are scaled down until hessian_bound ≤ this value, keeping
  /// the metric well inside the Kähler cone.
  double max_hessian = 0.5;
};

/// Random band-limited potential: nonzero integer wavevectors in
/// [-max_wavenumber, max_wavenumber]^{2n}, amplitudes in (0, max_amplitude],
/// uniform phases.
std::vector<Mode> sample_analytic_modes(const TorusDomain& domain, std::mt19937_64& rng,
                                        const AnalyticSampleOptions& options = {});

/// Energy fraction of the modes with max_a |k_a| > N/3 (zero mode excluded).
double spectral_tail_fraction(const TorusDomain& domain, const ComplexBuffer& spectrum);

}  // namespace calabi
