#include "calabi/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace calabi::flow {

namespace {

// Λ at one half-spectrum coefficient, from the derivative wavenumbers (zero
// at Nyquist, matching the Hessian multipliers).
double mode_rate(const TorusDomain& domain, const GridIndex& f) {
  double lap = 0.0;
  for (int a = 0; a < domain.real_dim(); ++a) {
    const double k = domain.derivative_wavenumber(a, f[a]);
    lap += k * k;
  }
  lap *= 0.25;
  return lap * lap;
}

bool is_cleared_mode(const TorusDomain& domain, std::size_t q, const GridIndex& f) {
  if (q == 0) return true;
  const int nyquist = domain.grid_size() / 2;
  for (int a = 0; a < domain.real_dim(); ++a) {
    if (std::abs(f[a]) == nyquist) return true;
  }
  return false;
}

void clear_modes(const TorusDomain& domain, ComplexBuffer& spectrum) {
  for_each_mode(domain, [&](std::size_t q, const GridIndex& f) {
    if (is_cleared_mode(domain, q, f)) spectrum[q] = 0.0;
  });
}

ComplexBuffer rhs_spectrum(const TorusDomain& domain, const ComplexBuffer& phi_hat, double mu) {
  const auto metric = metric_from_potential(PotentialField::from_spectrum(domain, phi_hat));
  ScalarField r = trace_against(metric, ricci(metric));
  for (double& v : r.values()) v -= mu;
  return forward_transform(domain, r.values());
}

DiagnosticsRecord diagnose(const PotentialField& phi, const MetricField& metric, const CurvatureBundle& curv,
                           double t, double mu) {
  DiagnosticsRecord d;
  d.t = t;
  d.calabi = calabi_energy(metric, curv, mu);
  d.ricci_eig_min = curv.ricci_eig_min;
  d.ricci_eig_max = curv.ricci_eig_max;
  d.scalar_min = curv.scalar_min;
  d.sup_phi = phi.values().sup_abs();
  d.spectral_tail = spectral_tail_fraction(phi.domain(), phi.spectrum());
  d.volume = volume(metric);
  d.mean_scalar = integrate(curv.scalar, metric) / d.volume;
  return d;
}

bool energy_acceptable(double before, double after, double slack) {
  if (!std::isfinite(after)) return false;
  return after <= before + slack * std::max(before, 1e-14);
}

}  // namespace

FlowState make_state(PotentialField phi, double t, double mu) {
  MetricField metric = metric_from_potential(phi);
  CurvatureBundle curv = curvature(metric);
  DiagnosticsRecord diag = diagnose(phi, metric, curv, t, mu);
  return FlowState{t, std::move(phi), std::move(metric), std::move(curv), diag};
}

ScalarField rhs(const FlowState& state, double mu) {
  ScalarField r = state.curvature.scalar;
  for (double& v : r.values()) v -= mu;
  return r;
}

double linearized_rate(const TorusDomain& domain, std::span<const int> k) {
  if (static_cast<int>(k.size()) != domain.real_dim()) throw DomainError("linearized_rate: wavevector has wrong length");
  double s = 0.0;
  for (int a = 0; a < domain.real_dim(); ++a) {
    const double r = k[a] / domain.period(a);
    s += r * r;
  }
  const double lambda = std::numbers::pi * std::numbers::pi * s;
  return lambda * lambda;
}

double max_linearized_rate(const TorusDomain& domain) {
  std::vector<int> k(domain.real_dim(), domain.grid_size() / 2 - 1);
  return linearized_rate(domain, k);
}

double explicit_stability_limit(const TorusDomain& domain, double c_stab) {
  return c_stab / max_linearized_rate(domain);
}

FlowState step_imex(const FlowState& state, double dt, double mu) {
  if (!(dt > 0.0)) throw DomainError("step_imex: dt must be positive");
  const auto& domain = state.phi.domain();
  const ComplexBuffer r_hat = forward_transform(domain, rhs(state, mu).values());
  const ComplexBuffer& phi_hat = state.phi.spectrum();
  ComplexBuffer next(domain.num_modes());
  for_each_mode(domain, [&](std::size_t q, const GridIndex& f) {
    if (is_cleared_mode(domain, q, f)) return;
    const double lambda = mode_rate(domain, f);
    next[q] = (phi_hat[q] + dt * (r_hat[q] + lambda * phi_hat[q])) / (1.0 + dt * lambda);
  });
  FlowState out = make_state(PotentialField::from_spectrum(domain, std::move(next)), state.t + dt, mu);
  out.diagnostics.dt_used = dt;
  return out;
}

FlowState step_explicit_rk(const FlowState& state, double dt, double mu) {
  if (!(dt > 0.0)) throw DomainError("step_explicit_rk: dt must be positive");
  const auto& domain = state.phi.domain();
  const ComplexBuffer& y = state.phi.spectrum();
  const std::size_t m = y.size();

  auto axpy = [&](const ComplexBuffer& k, double h) {
    ComplexBuffer out(m);
    for (std::size_t q = 0; q < m; ++q) out[q] = y[q] + h * k[q];
    return out;
  };

  const ComplexBuffer k1 = forward_transform(domain, rhs(state, mu).values());
  const ComplexBuffer k2 = rhs_spectrum(domain, axpy(k1, 0.5 * dt), mu);
  const ComplexBuffer k3 = rhs_spectrum(domain, axpy(k2, 0.5 * dt), mu);
  const ComplexBuffer k4 = rhs_spectrum(domain, axpy(k3, dt), mu);

  ComplexBuffer next(m);
  for (std::size_t q = 0; q < m; ++q) next[q] = y[q] + dt / 6.0 * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
  clear_modes(domain, next);
  FlowState out = make_state(PotentialField::from_spectrum(domain, std::move(next)), state.t + dt, mu);
  out.diagnostics.dt_used = dt;
  return out;
}

void validate(const FlowConfig& c) {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(c.dt_init) || !positive(c.dt_min) || !positive(c.dt_max))
    throw DomainError("flow config: dt_init, dt_min and dt_max must be positive");
  if (c.dt_min > c.dt_init || c.dt_init > c.dt_max)
    throw DomainError("flow config: require dt_min <= dt_init <= dt_max");
  if (!(c.dt_growth >= 1.0)) throw DomainError("flow config: dt_growth must be >= 1");
  if (!positive(c.t_max)) throw DomainError("flow config: t_max must be positive");
  if (!(c.stop_ca >= 0.0)) throw DomainError("flow config: stop_ca must be nonnegative");
  if (!(c.ca_slack >= 0.0)) throw DomainError("flow config: ca_slack must be nonnegative");
  if (c.warmup_steps < 1) throw DomainError("flow config: warmup_steps must be >= 1");
  if (!(c.monitor_factor >= 1.0)) throw DomainError("flow config: monitor_factor must be >= 1");
  if (c.record_every < 1) throw DomainError("flow config: record_every must be >= 1");
}

TrapMonitor::TrapMonitor(int warmup_steps, double factor) : warmup_steps_(warmup_steps), factor_(factor) {}

const MonitorStatus& TrapMonitor::observe(const DiagnosticsRecord& r) {
  if (status_.exited) return status_;
  if (observed_ < warmup_steps_) {
    k3_ = std::max(k3_, -r.ricci_eig_min);
    k4_ = std::max(k4_, r.ricci_eig_max);
    if (++observed_ == warmup_steps_) {
      // The bounds must be positive for the doubled window to make sense.
      k3_ = std::max(k3_, std::numeric_limits<double>::min());
      k4_ = std::max(k4_, std::numeric_limits<double>::min());
    }
    return status_;
  }
  ++observed_;
  if (r.ricci_eig_min < -factor_ * k3_) {
    status_ = {true, r.step, r.t, Bound::lower};
  } else if (r.ricci_eig_max > factor_ * k4_) {
    status_ = {true, r.step, r.t, Bound::upper};
  }
  return status_;
}

TrapMonitor TrapMonitor::restore(int warmup_steps, double factor, int observed, double k3, double k4,
                                 const MonitorStatus& status) {
  TrapMonitor m(warmup_steps, factor);
  m.observed_ = observed;
  m.k3_ = k3;
  m.k4_ = k4;
  m.status_ = status;
  return m;
}

std::string_view to_string(Bound b) {
  switch (b) {
    case Bound::lower: return "lower";
    case Bound::upper: return "upper";
    default: return "none";
  }
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::converged: return "converged";
    case Outcome::monitor_exit: return "monitor_exit";
    case Outcome::t_max: return "t_max";
    default: return "no_progress";
  }
}

namespace {

RunResult drive(FlowState state, RunProgress progress, const FlowConfig& config, double mu,
                const StepObserver& observer, bool emit_initial) {
  RunResult result;
  state.diagnostics.step = progress.step;
  result.trajectory.push_back(state.diagnostics);
  result.monitor_trace.push_back(progress.monitor.status());
  if (emit_initial && observer) observer(state, progress, state.diagnostics);

  auto finish = [&](Outcome o) {
    result.outcome = o;
    result.progress = progress;
    result.final_state.emplace(std::move(state));
    return std::move(result);
  };

  if (state.diagnostics.calabi <= config.stop_ca) return finish(Outcome::converged);
  if (progress.monitor.status().exited) return finish(Outcome::monitor_exit);

  while (state.t <= config.t_max) {
    const double dt = progress.dt_next;
    std::optional<FlowState> trial;
    try {
      trial.emplace(step_imex(state, dt, mu));
    } catch (const NotKahlerError&) {
      trial.reset();
    }
    if (!trial || !energy_acceptable(state.diagnostics.calabi, trial->diagnostics.calabi, config.ca_slack)) {
      ++progress.rejected;
      progress.dt_next = 0.5 * dt;
      if (progress.dt_next < config.dt_min) return finish(Outcome::no_progress);
      continue;
    }

    state = std::move(*trial);
    ++progress.step;
    state.diagnostics.step = progress.step;
    progress.dt_next = std::min(dt * config.dt_growth, config.dt_max);
    const MonitorStatus& status = progress.monitor.observe(state.diagnostics);
    result.trajectory.push_back(state.diagnostics);
    result.monitor_trace.push_back(status);
    if (observer) observer(state, progress, state.diagnostics);

    if (state.diagnostics.calabi <= config.stop_ca) return finish(Outcome::converged);
    if (status.exited) return finish(Outcome::monitor_exit);
  }
  return finish(Outcome::t_max);
}

}  // namespace

RunResult run(const PotentialField& initial, const FlowConfig& config, double mu, const StepObserver& observer) {
  validate(config);
  FlowState state = make_state(mean_normalize(initial), 0.0, mu);
  RunProgress progress;
  progress.dt_next = config.dt_init;
  progress.initial_calabi = state.diagnostics.calabi;
  progress.monitor = TrapMonitor(config.warmup_steps, config.monitor_factor);
  return drive(std::move(state), std::move(progress), config, mu, observer, true);
}

RunResult resume(const PotentialField& phi, double t, const RunProgress& progress, const FlowConfig& config, double mu,
                 const StepObserver& observer) {
  validate(config);
  FlowState state = make_state(phi, t, mu);
  state.diagnostics.dt_used = 0.0;
  return drive(std::move(state), progress, config, mu, observer, false);
}

}  // namespace calabi::flow
