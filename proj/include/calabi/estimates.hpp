#pragma once

#include <optional>
#include <string>
#include <vector>

#include "calabi/geometry.hpp"

namespace calabi::estimates {

/// Outcome of one pointwise identity or inequality check. For inequalities
/// the residual is the violation −(slack), so pass iff residual_sup ≤ tolerance
/// in every case.
struct IdentityReport {
  std::string name;
  double residual_sup = 0.0;
  double residual_l2 = 0.0;  ///< grid RMS
  double tolerance = 0.0;
  bool pass = false;
};

inline constexpr double kIdentityTol = 1e-9;
inline constexpr double kInequalityTol = 1e-12;
inline constexpr double kJensenTol = 1e-10;

/// A metric pair (ω′, ω) with lazily cached F = log(ω′ⁿ/ωⁿ), its complex
/// Hessian and both Ricci forms. Holds references: both metrics must outlive it.
class MetricPair {
 public:
  MetricPair(const MetricField& omega_prime, const MetricField& omega);
  MetricPair(MetricField&&, const MetricField&) = delete;
  MetricPair(const MetricField&, MetricField&&) = delete;
  MetricPair(MetricField&&, MetricField&&) = delete;

  const MetricField& omega_prime() const noexcept { return *omega_prime_; }
  const MetricField& omega() const noexcept { return *omega_; }
  const TorusDomain& domain() const noexcept { return omega_->domain(); }

  const ScalarField& F();
  const HermitianField& hessian_F();
  const HermitianField& ricci();
  const HermitianField& ricci_prime();

 private:
  const MetricField* omega_prime_;
  const MetricField* omega_;
  std::optional<ScalarField> F_;
  std::optional<HermitianField> hessian_F_;
  std::optional<HermitianField> ricci_;
  std::optional<HermitianField> ricci_prime_;
};

/// ΔF = R − g^{ij̄}R′_{ij̄}, Laplacian and R taken with respect to ω.
IdentityReport check_laplace_F(MetricPair& pair, double tolerance = kIdentityTol);
/// Δ′F = g′^{ij̄}R_{ij̄} − R(ω′).
IdentityReport check_dual_laplace_F(MetricPair& pair, double tolerance = kIdentityTol);
/// ∂∂̄F = Ric(ω) − Ric(ω′), sup over points and matrix entries.
IdentityReport check_ricci_difference(MetricPair& pair, double tolerance = kIdentityTol);
/// ∂∂̄F ≥ Ric(ω) − K₂ω with K₂ the largest eigenvalue of Ric(ω′) relative to ω.
IdentityReport check_hessian_lower_bound(MetricPair& pair, double tolerance = 1e-10);
/// e^F ≥ (n / tr_{ω′}ω)ⁿ pointwise.
IdentityReport check_amgm(MetricPair& pair, double tolerance = kInequalityTol);
/// (1/V)∫F ωⁿ ≤ 0 for ω′ in the class of ω.
IdentityReport check_jensen(MetricPair& pair, double tolerance = kJensenTol);

IdentityReport check_laplace_F(const MetricField& omega_prime, const MetricField& omega, double tolerance = kIdentityTol);
IdentityReport check_dual_laplace_F(const MetricField& omega_prime, const MetricField& omega,
                                    double tolerance = kIdentityTol);
IdentityReport check_ricci_difference(const MetricField& omega_prime, const MetricField& omega,
                                      double tolerance = kIdentityTol);
IdentityReport check_amgm(const MetricField& omega_prime, const MetricField& omega, double tolerance = kInequalityTol);
IdentityReport check_jensen(const MetricField& omega_prime, const MetricField& omega, double tolerance = kJensenTol);

struct GreensOptions {
  double tolerance = kIdentityTol;
  /// Flip the sign of Ĝ (fault injection for the checker itself).
  bool corrupt_sign = false;
};

/// Green's representation f(x) = (1/V)∫f ωⁿ − ∫Δf(y) G(x,y) ωⁿ(y) on the flat
/// background, with G(x,y) = (1/V)Σ Ĝ_k e^{iκ(x−y)}, Ĝ_k = −1/λ_k on modes
/// with λ_k ≠ 0 and Ĝ = 0 otherwise (λ_k the Δ eigenvalues).
/// Throws DomainError when ω is not the background metric.
IdentityReport check_greens(const MetricField& omega, const ScalarField& f, const GreensOptions& options = {});

/// Every check above on one pair; Green's formula is applied to F when ω is
/// the background and omitted otherwise.
std::vector<IdentityReport> run_suite(MetricPair& pair, const GreensOptions& greens = {});

}  // namespace calabi::estimates
