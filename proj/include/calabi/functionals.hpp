#pragma once

#include <cmath>

#include "calabi/cohomology.hpp"
#include "calabi/geometry.hpp"

namespace calabi {

/// The two sides of the Calabi energy decomposition
///   Ca = ∫|Ric − (μ/n)ω|² ωⁿ + Ψ
/// evaluated independently.
struct EnergyReport {
  double calabi = 0.0;
  double ricci_deviation = 0.0;
  double psi = 0.0;
  double decomposition_residual = 0.0;  ///< calabi − ricci_deviation − psi
  double mu = 0.0;
  double tolerance = 0.0;               ///< 1e-8·max(calabi, 1e-12)

  bool within_tolerance() const { return std::abs(decomposition_residual) <= tolerance; }
};

/// Relative residual bound used by decomposition_check.
inline constexpr double kDecompositionRelTol = 1e-8;

/// Ca = ∫(R − μ)² ωⁿ.
double calabi_energy(const MetricField& metric, double mu);
double calabi_energy(const MetricField& metric, const CurvatureBundle& curv, double mu);

/// ∫ g^{ik̄} g^{lj̄} T_{ij̄} T_{lk̄} ωⁿ with T = Ric − (μ/n) g.
double ricci_deviation_energy(const MetricField& metric, double mu);
double ricci_deviation_energy(const MetricField& metric, const HermitianField& ricci_form, double mu);

/// F = log(ω′ⁿ/ωⁿ) = log(det g′/det g).
ScalarField log_volume_ratio(const MetricField& omega_prime, const MetricField& omega);

EnergyReport decomposition_check(const MetricField& metric, const cohomology::CohomologyData& data);
EnergyReport decomposition_check(const MetricField& metric, const CurvatureBundle& curv,
                                 const cohomology::CohomologyData& data);

}  // namespace calabi
