#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "calabi/flow.hpp"

using namespace calabi;
using namespace calabi::flow;
using std::numbers::pi;

namespace {

PotentialField single(const TorusDomain& d, std::vector<int> k, double a) {
  const std::vector<Mode> m{{std::move(k), a, 0.0}};
  return potential_from_modes(d, m);
}

DiagnosticsRecord synthetic(int step, double lo, double hi) {
  DiagnosticsRecord r;
  r.step = step;
  r.t = 0.1 * step;
  r.ricci_eig_min = lo;
  r.ricci_eig_max = hi;
  return r;
}

}  // namespace

TEST_CASE("linearized rate") {
  const auto d = make_domain(1, 64);
  const std::vector<int> zero{0, 0}, k10{1, 0}, k11{1, 1}, k20{2, 0};
  CHECK(linearized_rate(d, zero) == 0.0);
  CHECK(linearized_rate(d, k10) == doctest::Approx(std::pow(pi, 4)).epsilon(1e-15));
  CHECK(linearized_rate(d, k11) > linearized_rate(d, k10));
  CHECK(linearized_rate(d, k20) > linearized_rate(d, k11));
  CHECK(linearized_rate(d, k20) == doctest::Approx(16 * std::pow(pi, 4)));
  const auto dp = make_domain(1, 16, {2, 1});
  CHECK(linearized_rate(dp, k10) == doctest::Approx(std::pow(pi, 4) / 16));
  CHECK(max_linearized_rate(make_domain(1, 16)) == doctest::Approx(std::pow(pi * pi * 98, 2)));
  CHECK(explicit_stability_limit(make_domain(1, 16)) == doctest::Approx(2.5 / std::pow(pi * pi * 98, 2)));
  const std::vector<int> bad{1};
  CHECK_THROWS_AS(linearized_rate(d, bad), DomainError);
}

TEST_CASE("rhs") {
  SUBCASE("flat state is a fixed point") {
    const auto d = make_domain(2, 8);
    CHECK(rhs(make_state(PotentialField::zero(d), 0.0, 0.0), 0.0).sup_abs() == 0.0);
  }
  SUBCASE("linearization: R − μ ≈ −π⁴ a cos(2πx)") {
    const auto d = make_domain(1, 64);
    const double a = 1e-4;
    const auto r = rhs(make_state(single(d, {1, 0}, a), 0.0, 0.0), 0.0);
    double err = 0.0;
    for (std::size_t p = 0; p < d.num_points(); ++p) {
      const double x = d.coordinate(0, d.point_index(p)[0]);
      err = std::max(err, std::abs(r[p] + std::pow(pi, 4) * a * std::cos(2 * pi * x)));
    }
    CHECK(err < 10 * std::pow(pi, 6) * a * a);
  }
  SUBCASE("mean against the evolving volume form vanishes") {
    const auto d = make_domain(2, 16);
    std::mt19937_64 rng(1);
    const auto s = make_state(potential_from_modes(d, sample_analytic_modes(d, rng)), 0.0, 0.0);
    CHECK(std::abs(integrate(rhs(s, 0.0), s.metric)) < 1e-12);
    CHECK(std::abs(s.diagnostics.mean_scalar) < 1e-12);
  }
  SUBCASE("translation equivariance on grid shifts") {
    const auto d = make_domain(1, 32);
    const std::vector<Mode> m{{{1, 2}, 0.01, 0.3}, {{3, -1}, 0.002, 1.1}};
    const auto phi = potential_from_modes(d, m);
    const int shift = 8;
    ScalarField moved(d);
    for (std::size_t p = 0; p < d.num_points(); ++p) {
      auto idx = d.point_index(p);
      idx[0] = (idx[0] + shift) % d.grid_size();
      moved[p] = phi.values()[d.flat_point(idx)];
    }
    const auto r0 = rhs(make_state(phi, 0.0, 0.0), 0.0);
    const auto r1 = rhs(make_state(PotentialField::from_values(moved), 0.0, 0.0), 0.0);
    double err = 0.0;
    for (std::size_t p = 0; p < d.num_points(); ++p) {
      auto idx = d.point_index(p);
      idx[0] = (idx[0] + shift) % d.grid_size();
      err = std::max(err, std::abs(r1[p] - r0[d.flat_point(idx)]));
    }
    CHECK(err < 1e-12 * r0.sup_abs());
  }
}

TEST_CASE("steppers") {
  SUBCASE("flat state is preserved exactly") {
    const auto d = make_domain(2, 8);
    const auto s = make_state(PotentialField::zero(d), 0.0, 0.0);
    CHECK(step_imex(s, 0.3, 0.0).phi.values().sup_abs() == 0.0);
    CHECK(step_explicit_rk(s, 1e-6, 0.0).phi.values().sup_abs() == 0.0);
  }
  SUBCASE("single small mode follows the implicit Euler recurrence") {
    const auto d = make_domain(1, 32);
    const double a = 1e-6, dt = 1e-3;
    const std::vector<int> k{1, 0};
    const auto s = step_imex(make_state(single(d, k, a), 0.0, 0.0), dt, 0.0);
    const double expect = a / (1 + dt * linearized_rate(d, k));
    CHECK(std::abs(s.phi.cosine_amplitude(k) - expect) < 100 * a * a);
    CHECK(s.t == dt);
    CHECK(s.diagnostics.dt_used == dt);
  }
  SUBCASE("two disjoint small modes evolve independently") {
    const auto d = make_domain(2, 16);
    const double a = 1e-6, dt = 1e-3;
    const std::vector<int> k1{1, 0, 0, 0}, k2{0, 0, 0, 2};
    const std::vector<Mode> m{{k1, a, 0.0}, {k2, a, 0.0}};
    const auto s = step_imex(make_state(potential_from_modes(d, m), 0.0, 0.0), dt, 0.0);
    CHECK(std::abs(s.phi.cosine_amplitude(k1) - a / (1 + dt * linearized_rate(d, k1))) < 1000 * a * a);
    CHECK(std::abs(s.phi.cosine_amplitude(k2) - a / (1 + dt * linearized_rate(d, k2))) < 1000 * a * a);
  }
  SUBCASE("results stay mean-zero") {
    const auto d = make_domain(1, 32);
    const std::vector<Mode> m{{{0, 0}, 4.0, 0.0}, {{1, 1}, 0.01, 0.0}};
    const auto s = step_imex(make_state(potential_from_modes(d, m), 0.0, 0.0), 1e-3, 0.0);
    CHECK(std::abs(s.phi.values().mean()) < 1e-17);
  }
  SUBCASE("RK4 agrees with IMEX as dt shrinks") {
    const auto d = make_domain(1, 16);
    const auto s0 = make_state(single(d, {1, 1}, 5e-3), 0.0, 0.0);
    double prev = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double dt = 1e-6 / (1 << i);
      const auto a = step_imex(s0, dt, 0.0);
      const auto b = step_explicit_rk(s0, dt, 0.0);
      double diff = 0.0;
      for (std::size_t p = 0; p < d.num_points(); ++p)
        diff = std::max(diff, std::abs(a.phi.values()[p] - b.phi.values()[p]));
      if (i > 0) CHECK(prev / diff == doctest::Approx(4.0).epsilon(0.125));
      prev = diff;
    }
  }
  SUBCASE("RK4 above its stability bound fails on a rough state") {
    const auto d = make_domain(1, 16);
    const std::vector<Mode> m{{{1, 0}, 1e-3, 0.0}, {{7, 7}, 1e-6, 0.0}};
    auto s = make_state(potential_from_modes(d, m), 0.0, 0.0);
    const double dt = 4.0 * explicit_stability_limit(d);
    bool failed = false;
    for (int i = 0; i < 200 && !failed; ++i) {
      try {
        auto next = step_explicit_rk(s, dt, 0.0);
        failed = !std::isfinite(next.diagnostics.calabi) || next.diagnostics.calabi > s.diagnostics.calabi;
        s = std::move(next);
      } catch (const NotKahlerError&) {
        failed = true;
      }
    }
    CHECK(failed);
  }
  SUBCASE("invalid dt") {
    const auto d = make_domain(1, 8);
    const auto s = make_state(PotentialField::zero(d), 0.0, 0.0);
    CHECK_THROWS_AS(step_imex(s, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(step_explicit_rk(s, -1.0, 0.0), DomainError);
  }
}

TEST_CASE("trap monitor") {
  SUBCASE("bounds come from the warmup window") {
    TrapMonitor m(3, 2.0);
    CHECK_FALSE(m.armed());
    m.observe(synthetic(1, -0.5, 0.2));
    m.observe(synthetic(2, -0.3, 0.4));
    CHECK_FALSE(m.armed());
    m.observe(synthetic(3, -0.1, 0.1));
    CHECK(m.armed());
    CHECK(m.k3() == 0.5);
    CHECK(m.k4() == 0.4);
    CHECK_FALSE(m.status().exited);
  }
  SUBCASE("crossing 2K₄ exits at exactly that step") {
    TrapMonitor m(2, 2.0);
    m.observe(synthetic(1, -0.5, 0.5));
    m.observe(synthetic(2, -0.5, 0.5));
    for (int s = 3; s < 8; ++s) CHECK_FALSE(m.observe(synthetic(s, -0.9, 1.0)).exited);
    const auto& st = m.observe(synthetic(8, -0.9, 1.0 + 1e-12));
    CHECK(st.exited);
    CHECK(st.step == 8);
    CHECK(st.time == doctest::Approx(0.8));
    CHECK(st.bound == Bound::upper);
    // Exit is sticky.
    CHECK(m.observe(synthetic(9, 0.0, 0.0)).step == 8);
  }
  SUBCASE("crossing −2K₃") {
    TrapMonitor m(1, 2.0);
    m.observe(synthetic(1, -0.25, 0.5));
    CHECK(m.observe(synthetic(2, -0.5, 0.0)).exited == false);
    const auto& st = m.observe(synthetic(3, -0.5000001, 0.0));
    CHECK(st.exited);
    CHECK(st.bound == Bound::lower);
  }
  SUBCASE("a flat warmup window still yields positive bounds") {
    TrapMonitor m(1, 2.0);
    m.observe(synthetic(1, 0.0, 0.0));
    CHECK(m.k3() > 0.0);
    CHECK(m.k4() > 0.0);
    CHECK(m.observe(synthetic(2, 0.0, 0.0)).exited == false);
  }
  SUBCASE("restore round-trips") {
    TrapMonitor m(2, 3.0);
    m.observe(synthetic(1, -0.1, 0.3));
    const auto r = TrapMonitor::restore(m.warmup_steps(), m.factor(), m.observed(), m.k3(), m.k4(), m.status());
    CHECK(r.observed() == 1);
    CHECK(r.k4() == m.k4());
    CHECK(r.factor() == 3.0);
  }
}

TEST_CASE("flow config validation") {
  FlowConfig c;
  CHECK_NOTHROW(validate(c));
  auto bad = [&](auto mutate) {
    FlowConfig x;
    mutate(x);
    CHECK_THROWS_AS(validate(x), DomainError);
  };
  bad([](FlowConfig& x) { x.dt_init = 0.0; });
  bad([](FlowConfig& x) { x.dt_min = 1.0; });
  bad([](FlowConfig& x) { x.dt_max = 1e-6; });
  bad([](FlowConfig& x) { x.dt_growth = 0.5; });
  bad([](FlowConfig& x) { x.t_max = -1.0; });
  bad([](FlowConfig& x) { x.stop_ca = -1.0; });
  bad([](FlowConfig& x) { x.ca_slack = -1.0; });
  bad([](FlowConfig& x) { x.warmup_steps = 0; });
  bad([](FlowConfig& x) { x.monitor_factor = 0.5; });
  bad([](FlowConfig& x) { x.record_every = 0; });
}

TEST_CASE("run") {
  SUBCASE("flat initial data converges at step 0") {
    const auto d = make_domain(1, 16);
    const auto r = run(PotentialField::zero(d), FlowConfig{}, 0.0);
    CHECK(r.outcome == Outcome::converged);
    CHECK(r.trajectory.size() == 1);
    CHECK(r.trajectory[0].calabi == 0.0);
    CHECK(r.progress.step == 0);
  }
  SUBCASE("initial data outside the cone") {
    const auto d = make_domain(1, 16);
    CHECK_THROWS_AS(run(single(d, {1, 0}, 0.2), FlowConfig{}, 0.0), NotKahlerError);
  }
  SUBCASE("desk run: monotone energy, conserved volume, observer sees every record") {
    const auto d = make_domain(1, 64);
    FlowConfig c;
    c.stop_ca = 1e-9;
    int calls = 0;
    const auto r = run(single(d, {1, 0}, 0.01), c, 0.0,
                       [&](const FlowState& s, const RunProgress& p, const DiagnosticsRecord& rec) {
                         CHECK(rec.step == p.step);
                         CHECK(s.t == rec.t);
                         ++calls;
                       });
    CHECK(r.outcome == Outcome::converged);
    CHECK(calls == static_cast<int>(r.trajectory.size()));
    CHECK_FALSE(r.progress.monitor.status().exited);
    const double v0 = r.trajectory[0].volume;
    for (std::size_t i = 1; i < r.trajectory.size(); ++i) {
      const auto& prev = r.trajectory[i - 1];
      const auto& cur = r.trajectory[i];
      CHECK(cur.calabi <= prev.calabi + c.ca_slack * std::max(prev.calabi, 1e-14));
      CHECK(std::abs(cur.volume - v0) <= 1e-9 * v0);
      CHECK(cur.step == static_cast<int>(i));
    }
    CHECK(r.trajectory.back().calabi <= 1e-9);
  }
  SUBCASE("t_max stops the run") {
    const auto d = make_domain(1, 32);
    FlowConfig c;
    c.t_max = 1e-3;
    c.stop_ca = 0.0;
    const auto r = run(single(d, {1, 0}, 0.01), c, 0.0);
    CHECK(r.outcome == Outcome::t_max);
    CHECK(r.final_state->t > c.t_max);
    CHECK(r.trajectory[r.trajectory.size() - 2].t <= c.t_max);
  }
  SUBCASE("linear-regime decay over the first decade") {
    const auto d = make_domain(1, 32);
    const std::vector<int> k{1, 0};
    const double lambda = linearized_rate(d, k);
    FlowConfig c;
    c.dt_init = c.dt_max = 1e-4;
    c.stop_ca = 0.0;
    c.t_max = std::log(10.0) / lambda;
    std::vector<std::pair<double, double>> amp;
    run(single(d, k, 1e-3), c, 0.0, [&](const FlowState& s, const RunProgress&, const DiagnosticsRecord&) {
      amp.emplace_back(s.t, s.phi.cosine_amplitude(k) / 1e-3);
    });
    REQUIRE(amp.size() > 10);
    for (const auto& [t, ratio] : amp) CHECK(std::abs(ratio - std::exp(-lambda * t)) <= 0.05 * std::exp(-lambda * t));
  }
  SUBCASE("resume continues bit-identically") {
    const auto d = make_domain(2, 8);
    std::mt19937_64 rng(17);
    const auto phi = potential_from_modes(d, sample_analytic_modes(d, rng));
    FlowConfig full;
    full.stop_ca = 0.0;
    full.t_max = 0.02;
    FlowConfig half = full;
    half.t_max = 0.01;
    const auto a = run(phi, full, 0.0);
    const auto h = run(phi, half, 0.0);
    const auto b = resume(h.final_state->phi, h.final_state->t, h.progress, full, 0.0);
    CHECK(b.outcome == a.outcome);
    CHECK(b.final_state->t == a.final_state->t);
    CHECK(b.trajectory.back().calabi == a.trajectory.back().calabi);
    CHECK(b.progress.step == a.progress.step);
    CHECK(b.final_state->phi.values().values() == a.final_state->phi.values().values());
  }
  SUBCASE("dt underflow reports no_progress") {
    // Strongly nonlinear data (g_min ≈ 0.11): the first trial is rejected and
    // halving drops dt below dt_min.
    const auto d = make_domain(1, 16);
    FlowConfig c;
    c.dt_min = c.dt_init = c.dt_max = 1e-3;
    c.stop_ca = 0.0;
    const auto r = run(single(d, {1, 0}, 0.09), c, 0.0);
    CHECK(r.outcome == Outcome::no_progress);
    CHECK(r.progress.rejected == 1);
    CHECK(r.progress.step == 0);
    CHECK(r.final_state->t == 0.0);
  }

}
