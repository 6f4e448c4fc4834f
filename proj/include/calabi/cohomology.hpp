#pragma once

#include "calabi/domain.hpp"

namespace calabi::cohomology {

/// The intersection numbers that μ and Ψ depend on.
struct CohomologyData {
  int n = 1;
  double c1_w_nm1 = 0.0;    ///< [c₁]·[ω]^{n−1}
  double c1sq_w_nm2 = 0.0;  ///< [c₁]²·[ω]^{n−2}; ignored for n = 1
  double w_n = 1.0;         ///< [ω]ⁿ > 0

  friend bool operator==(const CohomologyData&, const CohomologyData&) = default;
};

/// Pairings of a flat torus: c₁ = 0 and [ω]ⁿ = background volume.
CohomologyData torus(const TorusDomain& domain);

/// Throws DomainError on n < 1 or w_n ≤ 0 (or non-finite pairings).
void validate(const CohomologyData& data);

/// μ = π [c₁]·[ω]^{n−1} / [ω]ⁿ.
double mu(const CohomologyData& data);

/// Ψ = n(n−1)π²([c₁]²·[ω]^{n−2} − ([c₁]·[ω]^{n−1})²/[ω]ⁿ); exactly 0 for n = 1.
double psi(const CohomologyData& data);

/// The pairings of the class t·[ω].
CohomologyData scale_class(const CohomologyData& data, double t);

/// Whether the stored pairings are those of a class proportional to c₁
/// (the equality case Ψ = 0 for n ≥ 2), to relative tolerance.
bool is_proportional(const CohomologyData& data, double rel_tol = 1e-12);

struct PairingWeights {
  double c1_w = 1.0;
  double c1sq = 1.0;
  double w_n = 1.0;
};

/// Weighted max over the stored pairings of |a − b|. The c₁² pairing is
/// ignored for n = 1. Throws DomainError on dimension mismatch or negative weights.
double class_distance(const CohomologyData& a, const CohomologyData& b, const PairingWeights& weights = {});

}  // namespace calabi::cohomology
