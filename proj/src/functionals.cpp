#include "calabi/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace calabi {

double calabi_energy(const MetricField& metric, const CurvatureBundle& curv, double mu) {
  ScalarField sq(metric.domain());
  for (std::size_t p = 0; p < sq.size(); ++p) {
    const double d = curv.scalar[p] - mu;
    sq[p] = d * d;
  }
  return integrate(sq, metric);
}

double calabi_energy(const MetricField& metric, double mu) { return calabi_energy(metric, curvature(metric), mu); }

double ricci_deviation_energy(const MetricField& metric, const HermitianField& ricci_form, double mu) {
  require_same_domain(metric.domain(), ricci_form.domain(), "ricci_deviation_energy");
  const double shift = mu / metric.n();
  ScalarField sq(metric.domain());
  for (std::size_t p = 0; p < sq.size(); ++p) {
    const auto g = metric.at(p);
    const auto t = ricci_form.at(p) - shift * g;
    sq[p] = hermitian_norm_sq(g.inverse(), t);
  }
  return integrate(sq, metric);
}

double ricci_deviation_energy(const MetricField& metric, double mu) {
  return ricci_deviation_energy(metric, ricci(metric), mu);
}

ScalarField log_volume_ratio(const MetricField& omega_prime, const MetricField& omega) {
  require_same_domain(omega_prime.domain(), omega.domain(), "log_volume_ratio");
  ScalarField f(omega.domain());
  for (std::size_t p = 0; p < f.size(); ++p) f[p] = std::log(omega_prime.det()[p] / omega.det()[p]);
  return f;
}

EnergyReport decomposition_check(const MetricField& metric, const CurvatureBundle& curv,
                                 const cohomology::CohomologyData& data) {
  if (data.n != metric.n()) throw DomainError("decomposition_check: cohomology dimension does not match the metric");
  EnergyReport r;
  r.mu = cohomology::mu(data);
  r.psi = cohomology::psi(data);
  r.calabi = calabi_energy(metric, curv, r.mu);
  r.ricci_deviation = ricci_deviation_energy(metric, curv.ricci, r.mu);
  r.decomposition_residual = r.calabi - r.ricci_deviation - r.psi;
  r.tolerance = kDecompositionRelTol * std::max(r.calabi, 1e-12);
  return r;
}

EnergyReport decomposition_check(const MetricField& metric, const cohomology::CohomologyData& data) {
  return decomposition_check(metric, curvature(metric), data);
}

}  // namespace calabi
