#include "calabi/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace calabi {

namespace {

// Derivative wavenumbers per axis, indexed by frequency + N/2.
struct WavenumberTable {
  explicit WavenumberTable(const TorusDomain& domain) : offset(domain.grid_size() / 2) {
    for (int a = 0; a < domain.real_dim(); ++a) {
      table[a].resize(domain.grid_size() + 1);
      for (int f = -offset; f <= offset; ++f) table[a][f + offset] = domain.derivative_wavenumber(a, f);
    }
  }
  double operator()(int axis, int frequency) const { return table[axis][frequency + offset]; }

  int offset;
  std::array<std::vector<double>, kMaxRealDim> table;
};

// Fourier multiplier of ∂∂̄ plane `plane` at a mode with wavenumbers κ.
// plane 0: ∂1∂1̄, 1: ∂2∂2̄, 2: Re ∂1∂2̄, 3: Im ∂1∂2̄. For n = 2,
// ∂1∂2̄ ↦ ¼(iκ0 + κ1)(iκ2 − κ3).
double hessian_multiplier(int plane, const std::array<double, kMaxRealDim>& k) {
  switch (plane) {
    case 0: return -0.25 * (k[0] * k[0] + k[1] * k[1]);
    case 1: return -0.25 * (k[2] * k[2] + k[3] * k[3]);
    case 2: return -0.25 * (k[0] * k[2] + k[1] * k[3]);
    default: return 0.25 * (k[1] * k[2] - k[0] * k[3]);
  }
}

double grid_mean(const RealBuffer& v) {
  double sum = 0.0;
  double carry = 0.0;
  for (double x : v) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return (sum + carry) / static_cast<double>(v.size());
}

double factorial(int n) { return n == 2 ? 2.0 : 1.0; }

double period_product(const TorusDomain& d) {
  double p = 1.0;
  for (double x : d.periods()) p *= x;
  return p;
}

}  // namespace

HermitianField complex_hessian(const TorusDomain& domain, const ComplexBuffer& spectrum) {
  if (spectrum.size() != domain.num_modes()) throw DomainError("complex_hessian: spectrum size mismatch");
  const WavenumberTable kappa(domain);
  const int dim = domain.real_dim();
  HermitianField out(domain);
  const int planes = out.num_planes();
  std::vector<ComplexBuffer> scratch(planes, ComplexBuffer(domain.num_modes()));
  for_each_mode(domain, [&](std::size_t q, const GridIndex& f) {
    std::array<double, kMaxRealDim> k{};
    for (int a = 0; a < dim; ++a) k[a] = kappa(a, f[a]);
    for (int plane = 0; plane < planes; ++plane) scratch[plane][q] = hessian_multiplier(plane, k) * spectrum[q];
  });
  for (int plane = 0; plane < planes; ++plane) out.plane(plane) = inverse_transform(domain, std::move(scratch[plane]));
  return out;
}

HermitianField complex_hessian(const PotentialField& phi) { return complex_hessian(phi.domain(), phi.spectrum()); }

HermitianField complex_hessian(const ScalarField& f) {
  return complex_hessian(f.domain(), forward_transform(f.domain(), f.values()));
}

MetricField::MetricField(HermitianField g) : g_(std::move(g)), det_(g_.size()) {
  const int n = g_.n();
  min_eigenvalue_ = std::numeric_limits<double>::infinity();
  std::size_t worst = 0;
  bool identity = true;
  const auto id = HermitianMatrix::identity(n);
  for (std::size_t p = 0; p < g_.size(); ++p) {
    const auto m = g_.at(p);
    det_[p] = m.det();
    const double lo = generalized_eigenvalues(m, id).first;
    if (lo < min_eigenvalue_ || std::isnan(lo)) {
      min_eigenvalue_ = lo;
      worst = p;
    }
    if (identity && (m.a11 != 1.0 || (n == 2 && (m.a22 != 1.0 || m.a12 != 0.0)))) identity = false;
  }
  is_background_ = identity;
  if (!(min_eigenvalue_ >= kPositivityFloor)) throw NotKahlerError(min_eigenvalue_, worst);
}

MetricField MetricField::from_tensor(HermitianField g) { return MetricField(std::move(g)); }

MetricField MetricField::background(const TorusDomain& domain) {
  HermitianField g(domain);
  std::fill(g.plane(0).begin(), g.plane(0).end(), 1.0);
  if (domain.complex_dim() == 2) std::fill(g.plane(1).begin(), g.plane(1).end(), 1.0);
  return MetricField(std::move(g));
}

MetricField metric_from_potential(const PotentialField& phi) {
  HermitianField g = complex_hessian(phi);
  for (double& v : g.plane(0)) v += 1.0;
  if (g.n() == 2) {
    for (double& v : g.plane(1)) v += 1.0;
  }
  return MetricField::from_tensor(std::move(g));
}

HermitianField ricci(const MetricField& metric) {
  const auto& domain = metric.domain();
  if (metric.is_background()) return HermitianField(domain);
  RealBuffer log_det(metric.det().size());
  std::transform(metric.det().begin(), metric.det().end(), log_det.begin(), [](double d) { return std::log(d); });
  HermitianField ric = complex_hessian(domain, forward_transform(domain, log_det));
  for (int plane = 0; plane < ric.num_planes(); ++plane) {
    for (double& v : ric.plane(plane)) v = -v;
  }
  return ric;
}

std::pair<double, double> relative_eigenvalue_range(const HermitianField& ricci_form, const MetricField* reference) {
  if (reference != nullptr) require_same_domain(ricci_form.domain(), reference->domain(), "relative_eigenvalue_range");
  const auto id = HermitianMatrix::identity(ricci_form.n());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < ricci_form.size(); ++p) {
    const auto [a, b] = generalized_eigenvalues(ricci_form.at(p), reference ? reference->at(p) : id);
    lo = std::min(lo, a);
    hi = std::max(hi, b);
  }
  return {lo, hi};
}

ScalarField trace_against(const MetricField& metric, const HermitianField& a) {
  require_same_domain(metric.domain(), a.domain(), "trace_against");
  ScalarField out(metric.domain());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = trace_product(metric.inverse_at(p), a.at(p));
  return out;
}

CurvatureBundle scalar_curvature(const MetricField& metric, HermitianField ricci_form, const MetricField* reference) {
  ScalarField scalar = trace_against(metric, ricci_form);
  const auto range = relative_eigenvalue_range(ricci_form, reference);
  const double smin = scalar.min();
  const double smax = scalar.max();
  return CurvatureBundle{std::move(ricci_form), std::move(scalar), range.first, range.second, smin, smax};
}

CurvatureBundle curvature(const MetricField& metric) { return scalar_curvature(metric, ricci(metric)); }

ScalarField laplacian(const MetricField& metric, const ScalarField& f) {
  require_same_domain(metric.domain(), f.domain(), "laplacian");
  return trace_against(metric, complex_hessian(f));
}

double integrate(const ScalarField& f, const MetricField& metric) {
  require_same_domain(metric.domain(), f.domain(), "integrate");
  RealBuffer weighted(f.size());
  for (std::size_t p = 0; p < f.size(); ++p) weighted[p] = f[p] * metric.det()[p];
  const auto& d = metric.domain();
  return factorial(d.complex_dim()) * grid_mean(weighted) * period_product(d);
}

double volume(const MetricField& metric) {
  const auto& d = metric.domain();
  return factorial(d.complex_dim()) * grid_mean(metric.det()) * period_product(d);
}

double min_metric_ratio(const MetricField& omega_prime, const MetricField& omega) {
  require_same_domain(omega_prime.domain(), omega.domain(), "min_metric_ratio");
  double c = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < omega.tensor().size(); ++p)
    c = std::min(c, generalized_eigenvalues(omega_prime.at(p), omega.at(p)).first);
  return c;
}

}  // namespace calabi
