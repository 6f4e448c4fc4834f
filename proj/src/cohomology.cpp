#include "calabi/cohomology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace calabi::cohomology {

CohomologyData torus(const TorusDomain& domain) {
  return {domain.complex_dim(), 0.0, 0.0, domain.background_volume()};
}

void validate(const CohomologyData& data) {
  if (data.n < 1) throw DomainError("cohomology: dimension must be >= 1");
  if (!(data.w_n > 0.0) || !std::isfinite(data.w_n)) throw DomainError("cohomology: [omega]^n must be positive");
  if (!std::isfinite(data.c1_w_nm1) || !std::isfinite(data.c1sq_w_nm2))
    throw DomainError("cohomology: pairings must be finite");
}

double mu(const CohomologyData& data) {
  validate(data);
  return std::numbers::pi * data.c1_w_nm1 / data.w_n;
}

double psi(const CohomologyData& data) {
  validate(data);
  if (data.n == 1) return 0.0;
  const double n = data.n;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return n * (n - 1.0) * pi2 * (data.c1sq_w_nm2 - data.c1_w_nm1 * data.c1_w_nm1 / data.w_n);
}

CohomologyData scale_class(const CohomologyData& data, double t) {
  if (!(t > 0.0)) throw DomainError("cohomology: class scale must be positive");
  CohomologyData out = data;
  out.c1_w_nm1 *= std::pow(t, data.n - 1);
  out.c1sq_w_nm2 *= std::pow(t, data.n - 2);
  out.w_n *= std::pow(t, data.n);
  return out;
}

bool is_proportional(const CohomologyData& data, double rel_tol) {
  validate(data);
  if (data.n == 1) return true;
  const double lhs = data.c1sq_w_nm2 * data.w_n;
  const double rhs = data.c1_w_nm1 * data.c1_w_nm1;
  return std::abs(lhs - rhs) <= rel_tol * std::max({std::abs(lhs), std::abs(rhs), 1e-300});
}

double class_distance(const CohomologyData& a, const CohomologyData& b, const PairingWeights& w) {
  if (a.n != b.n) throw DomainError("class_distance: dimension mismatch");
  if (w.c1_w < 0.0 || w.c1sq < 0.0 || w.w_n < 0.0) throw DomainError("class_distance: weights must be nonnegative");
  double d = std::max(w.c1_w * std::abs(a.c1_w_nm1 - b.c1_w_nm1), w.w_n * std::abs(a.w_n - b.w_n));
  if (a.n >= 2) d = std::max(d, w.c1sq * std::abs(a.c1sq_w_nm2 - b.c1sq_w_nm2));
  return d;
}

}  // namespace calabi::cohomology
