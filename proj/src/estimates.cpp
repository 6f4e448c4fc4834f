#include "calabi/estimates.hpp"

#include <algorithm>
#include <cmath>

#include "calabi/functionals.hpp"

namespace calabi::estimates {

namespace {

// Accumulates |r| pointwise into sup and RMS.
struct Residual {
  double sup = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;

  void add(double r) {
    const double a = std::abs(r);
    if (!(a <= sup)) sup = a;  // propagates NaN
    sum_sq += a * a;
    ++count;
  }

  IdentityReport report(std::string name, double tolerance) const {
    IdentityReport r;
    r.name = std::move(name);
    r.residual_sup = sup;
    r.residual_l2 = count ? std::sqrt(sum_sq / count) : 0.0;
    r.tolerance = tolerance;
    r.pass = sup <= tolerance;
    return r;
  }
};

// One-sided: accumulates the violation max(0, −slack) but reports
// residual_sup = −min(slack), which may be negative (strict inequality).
struct Slack {
  double min_slack = INFINITY;
  double sum_sq = 0.0;
  std::size_t count = 0;

  void add(double slack) {
    if (!(slack >= min_slack)) min_slack = slack;
    const double v = std::max(0.0, -slack);
    sum_sq += v * v;
    ++count;
  }

  IdentityReport report(std::string name, double tolerance) const {
    IdentityReport r;
    r.name = std::move(name);
    r.residual_sup = -min_slack;
    r.residual_l2 = count ? std::sqrt(sum_sq / count) : 0.0;
    r.tolerance = tolerance;
    r.pass = r.residual_sup <= tolerance;
    return r;
  }
};

}  // namespace

MetricPair::MetricPair(const MetricField& omega_prime, const MetricField& omega)
    : omega_prime_(&omega_prime), omega_(&omega) {
  require_same_domain(omega_prime.domain(), omega.domain(), "MetricPair");
}

const ScalarField& MetricPair::F() {
  if (!F_) F_.emplace(log_volume_ratio(*omega_prime_, *omega_));
  return *F_;
}

const HermitianField& MetricPair::hessian_F() {
  if (!hessian_F_) hessian_F_.emplace(complex_hessian(F()));
  return *hessian_F_;
}

const HermitianField& MetricPair::ricci() {
  if (!ricci_) ricci_.emplace(calabi::ricci(*omega_));
  return *ricci_;
}

const HermitianField& MetricPair::ricci_prime() {
  if (!ricci_prime_) ricci_prime_.emplace(calabi::ricci(*omega_prime_));
  return *ricci_prime_;
}

IdentityReport check_laplace_F(MetricPair& pair, double tolerance) {
  const ScalarField lhs = trace_against(pair.omega(), pair.hessian_F());
  const ScalarField scalar = trace_against(pair.omega(), pair.ricci());
  const ScalarField traced = trace_against(pair.omega(), pair.ricci_prime());
  Residual res;
  for (std::size_t p = 0; p < lhs.size(); ++p) res.add(lhs[p] - (scalar[p] - traced[p]));
  return res.report("laplace_F", tolerance);
}

IdentityReport check_dual_laplace_F(MetricPair& pair, double tolerance) {
  const ScalarField lhs = trace_against(pair.omega_prime(), pair.hessian_F());
  const ScalarField traced = trace_against(pair.omega_prime(), pair.ricci());
  const ScalarField scalar_prime = trace_against(pair.omega_prime(), pair.ricci_prime());
  Residual res;
  for (std::size_t p = 0; p < lhs.size(); ++p) res.add(lhs[p] - (traced[p] - scalar_prime[p]));
  return res.report("dual_laplace_F", tolerance);
}

IdentityReport check_ricci_difference(MetricPair& pair, double tolerance) {
  const HermitianField& h = pair.hessian_F();
  const HermitianField& ric = pair.ricci();
  const HermitianField& ric_prime = pair.ricci_prime();
  Residual res;
  for (std::size_t p = 0; p < h.size(); ++p) res.add(max_abs_entry(h.at(p) - (ric.at(p) - ric_prime.at(p))));
  return res.report("ricci_difference", tolerance);
}

IdentityReport check_hessian_lower_bound(MetricPair& pair, double tolerance) {
  const auto [lo, k2] = relative_eigenvalue_range(pair.ricci_prime(), &pair.omega());
  (void)lo;
  const HermitianField& h = pair.hessian_F();
  const HermitianField& ric = pair.ricci();
  Slack slack;
  for (std::size_t p = 0; p < h.size(); ++p) {
    const HermitianMatrix g = pair.omega().at(p);
    const HermitianMatrix form = h.at(p) - ric.at(p) + k2 * g;
    slack.add(generalized_eigenvalues(form, g).first);
  }
  return slack.report("hessian_lower_bound", tolerance);
}

IdentityReport check_amgm(MetricPair& pair, double tolerance) {
  const ScalarField& F = pair.F();
  const int n = pair.omega().n();
  Slack slack;
  for (std::size_t p = 0; p < F.size(); ++p) {
    const double tr = trace_product(pair.omega_prime().inverse_at(p), pair.omega().at(p));
    slack.add(std::exp(F[p]) - std::pow(n / tr, n));
  }
  return slack.report("amgm", tolerance);
}

IdentityReport check_jensen(MetricPair& pair, double tolerance) {
  const double mean = integrate(pair.F(), pair.omega()) / volume(pair.omega());
  Slack slack;
  slack.add(-mean);
  return slack.report("jensen", tolerance);
}

IdentityReport check_laplace_F(const MetricField& omega_prime, const MetricField& omega, double tolerance) {
  MetricPair pair(omega_prime, omega);
  return check_laplace_F(pair, tolerance);
}

IdentityReport check_dual_laplace_F(const MetricField& omega_prime, const MetricField& omega, double tolerance) {
  MetricPair pair(omega_prime, omega);
  return check_dual_laplace_F(pair, tolerance);
}

IdentityReport check_ricci_difference(const MetricField& omega_prime, const MetricField& omega, double tolerance) {
  MetricPair pair(omega_prime, omega);
  return check_ricci_difference(pair, tolerance);
}

IdentityReport check_amgm(const MetricField& omega_prime, const MetricField& omega, double tolerance) {
  MetricPair pair(omega_prime, omega);
  return check_amgm(pair, tolerance);
}

IdentityReport check_jensen(const MetricField& omega_prime, const MetricField& omega, double tolerance) {
  MetricPair pair(omega_prime, omega);
  return check_jensen(pair, tolerance);
}

IdentityReport check_greens(const MetricField& omega, const ScalarField& f, const GreensOptions& options) {
  require_same_domain(omega.domain(), f.domain(), "check_greens");
  if (!omega.is_background()) throw DomainError("check_greens: only the flat background metric is supported");
  const TorusDomain& domain = omega.domain();

  const double average = integrate(f, omega) / volume(omega);
  const ScalarField lap = laplacian(omega, f);

  // ∫Δf(y) G(x,y) ωⁿ(y) is a convolution; with the 1/V in G only the
  // normalized coefficients of Δf survive.
  ComplexBuffer conv = forward_transform(domain, lap.values());
  const double sign = options.corrupt_sign ? -1.0 : 1.0;
  for_each_mode(domain, [&](std::size_t q, const GridIndex& freq) {
    double k2 = 0.0;
    for (int a = 0; a < domain.real_dim(); ++a) {
      const double k = domain.derivative_wavenumber(a, freq[a]);
      k2 += k * k;
    }
    const double lambda = -0.25 * k2;
    conv[q] = lambda == 0.0 ? 0.0 : conv[q] * (sign * -1.0 / lambda);
  });
  const RealBuffer integral = inverse_transform(domain, std::move(conv));

  Residual res;
  for (std::size_t p = 0; p < f.size(); ++p) res.add(f[p] - (average - integral[p]));
  return res.report("greens", options.tolerance);
}

std::vector<IdentityReport> run_suite(MetricPair& pair, const GreensOptions& greens) {
  std::vector<IdentityReport> out;
  out.push_back(check_laplace_F(pair));
  out.push_back(check_dual_laplace_F(pair));
  out.push_back(check_ricci_difference(pair));
  out.push_back(check_hessian_lower_bound(pair));
  out.push_back(check_amgm(pair));
  out.push_back(check_jensen(pair));
  if (pair.omega().is_background()) out.push_back(check_greens(pair.omega(), pair.F(), greens));
  return out;
}

}  // namespace calabi::estimates
