#pragma once

#include <cstddef>

#include "calabi/domain.hpp"
#include "calabi/fields.hpp"
#include "calabi/hermitian.hpp"

namespace calabi {

/// Metrics whose smallest eigenvalue falls below this are rejected.
inline constexpr double kPositivityFloor = 1e-10;

/// A positive Hermitian metric g_{ij̄} per grid point with its determinant.
/// The inverse is formed on access (closed form for n ≤ 2).
class MetricField {
 public:
  /// Validates positivity. Throws NotKahlerError when the smallest
  /// eigenvalue anywhere is below kPositivityFloor.
  static MetricField from_tensor(HermitianField g);

  /// The flat background metric g = I.
  static MetricField background(const TorusDomain& domain);

  const TorusDomain& domain() const noexcept { return g_.domain(); }
  int n() const noexcept { return g_.n(); }
  const HermitianField& tensor() const noexcept { return g_; }
  HermitianMatrix at(std::size_t p) const { return g_.at(p); }
  HermitianMatrix inverse_at(std::size_t p) const { return g_.at(p).inverse(); }
  const RealBuffer& det() const noexcept { return det_; }
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

  /// True when g is exactly the identity at every point.
  bool is_background() const noexcept { return is_background_; }

 private:
  explicit MetricField(HermitianField g);

  HermitianField g_;
  RealBuffer det_;
  double min_eigenvalue_ = 0.0;
  bool is_background_ = false;
};

/// Ricci form, scalar curvature and their extremes.
struct CurvatureBundle {
  HermitianField ricci;
  ScalarField scalar;
  /// Extremes over the grid of the eigenvalues of Ric relative to the reference metric.
  double ricci_eig_min = 0.0;
  double ricci_eig_max = 0.0;
  double scalar_min = 0.0;
  double scalar_max = 0.0;
};

/// ∂_i∂_j̄ f computed spectrally, with ∂_j∂_j̄ = ¼(∂²_{x_j} + ∂²_{y_j}).
HermitianField complex_hessian(const TorusDomain& domain, const ComplexBuffer& spectrum);
HermitianField complex_hessian(const PotentialField& phi);
HermitianField complex_hessian(const ScalarField& f);

/// g = I + ∂∂̄φ. Throws NotKahlerError when positivity fails.
MetricField metric_from_potential(const PotentialField& phi);

/// R_{ij̄} = −∂_i∂_j̄ log det g.
HermitianField ricci(const MetricField& metric);

/// R = g^{ij̄} R_{ij̄} plus extremes. Ricci eigenvalues are taken relative to
/// `reference`, or to the background metric when it is null.
CurvatureBundle scalar_curvature(const MetricField& metric, HermitianField ricci_form,
                                 const MetricField* reference = nullptr);

/// ricci + scalar_curvature against the background.
CurvatureBundle curvature(const MetricField& metric);

/// Δ_g f = g^{ij̄} ∂_i∂_j̄ f.
ScalarField laplacian(const MetricField& metric, const ScalarField& f);

/// ∫ f ω_gⁿ = n!·mean(f·det g)·∏periods.
double integrate(const ScalarField& f, const MetricField& metric);

/// ∫ ω_gⁿ.
double volume(const MetricField& metric);

/// Largest c with ω′ ≥ c·ω: the grid minimum of the smallest generalized
/// eigenvalue of (g′, g).
double min_metric_ratio(const MetricField& omega_prime, const MetricField& omega);

/// Pointwise g^{ij̄} A_{ij̄}.
ScalarField trace_against(const MetricField& metric, const HermitianField& a);

/// Eigenvalue extremes of a Hermitian form relative to `reference` (the
/// background when null), as (min, max).
std::pair<double, double> relative_eigenvalue_range(const HermitianField& form, const MetricField* reference = nullptr);

}  // namespace calabi
