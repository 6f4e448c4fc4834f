#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "calabi/functionals.hpp"

using namespace calabi;
using std::numbers::pi;

namespace {

PotentialField single(const TorusDomain& d, std::vector<int> k, double a) {
  const std::vector<Mode> m{{std::move(k), a, 0.0}};
  return potential_from_modes(d, m);
}

// ∫₀¹ R(x)² g(x) dx for g = 1 − π²a cos(2πx), by a fine periodic trapezoid
// rule on the closed-form curvature.
double calabi_dim1_quadrature(double a, int samples = 4096) {
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = static_cast<double>(i) / samples;
    const double g = 1.0 - pi * pi * a * std::cos(2 * pi * x);
    const double gp = 2 * std::pow(pi, 3) * a * std::sin(2 * pi * x);
    const double gpp = 4 * std::pow(pi, 4) * a * std::cos(2 * pi * x);
    const double r = -(gpp / g - (gp / g) * (gp / g)) / (4 * g);
    sum += r * r * g;
  }
  return sum / samples;
}

}  // namespace

TEST_CASE("calabi energy") {
  SUBCASE("flat metric") {
    const auto d = make_domain(2, 8);
    CHECK(calabi_energy(MetricField::background(d), 0.0) == 0.0);
    CHECK(ricci_deviation_energy(MetricField::background(d), 0.0) == 0.0);
  }
  SUBCASE("linear regime: Ca ≈ π⁸a²/2") {
    const double a = 1e-4;
    const auto d = make_domain(1, 64);
    const double ca = calabi_energy(metric_from_potential(single(d, {1, 0}, a)), 0.0);
    CHECK(ca == doctest::Approx(std::pow(pi, 8) * a * a / 2).epsilon(0.01));
  }
  SUBCASE("nonlinear regime matches closed-form quadrature") {
    const double a = 0.05;
    const auto d = make_domain(1, 64);
    const double ca = calabi_energy(metric_from_potential(single(d, {1, 0}, a)), 0.0);
    CHECK(ca == doctest::Approx(calabi_dim1_quadrature(a)).epsilon(1e-10));
  }
  SUBCASE("shifting μ expands the square") {
    const auto d = make_domain(2, 16);
    std::mt19937_64 rng(4);
    const auto g = metric_from_potential(potential_from_modes(d, sample_analytic_modes(d, rng)));
    const auto curv = curvature(g);
    const double mu = 0.3, c = 0.7;
    ScalarField shifted = curv.scalar;
    for (double& v : shifted.values()) v -= mu;
    const double expect = calabi_energy(g, curv, mu) + c * c * volume(g) - 2 * c * integrate(shifted, g);
    CHECK(calabi_energy(g, curv, mu + c) == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("refinement agreement") {
    const auto d32 = make_domain(1, 32);
    const auto d64 = make_domain(1, 64);
    const double c32 = calabi_energy(metric_from_potential(single(d32, {1, 0}, 0.03)), 0.0);
    const double c64 = calabi_energy(metric_from_potential(single(d64, {1, 0}, 0.03)), 0.0);
    CHECK(c32 == doctest::Approx(c64).epsilon(1e-12));
  }
}

TEST_CASE("ricci deviation energy") {
  SUBCASE("dim 1 equals the Calabi energy") {
    const auto d = make_domain(1, 64);
    for (double mu : {0.0, 0.4}) {
      const auto g = metric_from_potential(single(d, {1, 1}, 0.01));
      CHECK(ricci_deviation_energy(g, mu) == doctest::Approx(calabi_energy(g, mu)).epsilon(1e-14));
    }
  }
  SUBCASE("product metric sums the factor energies") {
    const double a = 0.02, b = 0.01;
    const auto d2 = make_domain(2, 32);
    const std::vector<Mode> m{{{1, 0, 0, 0}, a, 0.0}, {{0, 0, 1, 0}, b, 0.0}};
    const auto g = metric_from_potential(potential_from_modes(d2, m));
    // ω² = 2 det g dx, factor volumes 1: the integral is 2(Ca₁ + Ca₂).
    const double expect = 2 * (calabi_dim1_quadrature(a) + calabi_dim1_quadrature(b));
    CHECK(ricci_deviation_energy(g, 0.0) == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("log volume ratio") {
  const auto d = make_domain(2, 8);
  const auto bg = MetricField::background(d);
  CHECK(log_volume_ratio(bg, bg).sup_abs() == 0.0);
  HermitianField two(d);
  for (std::size_t p = 0; p < d.num_points(); ++p) two.set(p, HermitianMatrix::scalar(2, 2.0));
  const auto F = log_volume_ratio(MetricField::from_tensor(two), bg);
  for (std::size_t p = 0; p < d.num_points(); ++p) CHECK(F[p] == doctest::Approx(2 * std::log(2.0)).epsilon(1e-15));

  SUBCASE("volume consistency and Jensen") {
    const auto d1 = make_domain(1, 32);
    const auto b1 = MetricField::background(d1);
    const auto g = metric_from_potential(single(d1, {2, 1}, 0.005));
    auto F1 = log_volume_ratio(g, b1);
    ScalarField e(d1);
    for (std::size_t p = 0; p < e.size(); ++p) e[p] = std::exp(F1[p]);
    CHECK(integrate(e, b1) == doctest::Approx(volume(g)).epsilon(1e-14));
    CHECK(integrate(F1, b1) / volume(b1) < 0.0);
  }
}

TEST_CASE("decomposition identity") {
  SUBCASE("flat metric") {
    const auto d = make_domain(2, 8);
    const auto r = decomposition_check(MetricField::background(d), cohomology::torus(d));
    CHECK(r.calabi == 0.0);
    CHECK(r.ricci_deviation == 0.0);
    CHECK(r.psi == 0.0);
    CHECK(r.decomposition_residual == 0.0);
    CHECK(r.within_tolerance());
  }
  SUBCASE("dim 2 cos·cos potential") {
    const double a = 1e-3;
    const auto d = make_domain(2, 32);
    const std::vector<Mode> m{{{1, 0, 1, 0}, a / 2, 0.0}, {{1, 0, -1, 0}, a / 2, 0.0}};
    const auto r = decomposition_check(metric_from_potential(potential_from_modes(d, m)), cohomology::torus(d));
    CHECK(r.calabi > 0.0);
    CHECK(std::abs(r.decomposition_residual) <= 1e-8 * r.calabi);
    CHECK(r.within_tolerance());
  }
  SUBCASE("dim 1: both sides are the same integral") {
    const auto d = make_domain(1, 64);
    const auto r = decomposition_check(metric_from_potential(single(d, {1, 0}, 0.02)), cohomology::torus(d));
    CHECK(std::abs(r.decomposition_residual) <= 1e-14 * r.calabi);
  }
  SUBCASE("random dim-2 potentials, strongly nonlinear") {
    const auto d = make_domain(2, 16);
    std::mt19937_64 rng(21);
    AnalyticSampleOptions opts;
    opts.max_amplitude = 0.05;
    opts.max_hessian = 0.8;
    for (int i = 0; i < 4; ++i) {
      const auto r = decomposition_check(
          metric_from_potential(potential_from_modes(d, sample_analytic_modes(d, rng, opts))), cohomology::torus(d));
      CHECK(r.within_tolerance());
    }
  }
  SUBCASE("dimension mismatch") {
    const auto d = make_domain(1, 8);
    CHECK_THROWS_AS(decomposition_check(MetricField::background(d), {2, 0.0, 0.0, 2.0}), DomainError);
  }
}
