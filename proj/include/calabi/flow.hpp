#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "calabi/fields.hpp"
#include "calabi/functionals.hpp"
#include "calabi/geometry.hpp"

namespace calabi::flow {

/// Resolution warnings are raised above this spectral tail fraction.
inline constexpr double kTailWarning = 1e-8;

struct DiagnosticsRecord {
  int step = 0;
  double t = 0.0;
  double dt_used = 0.0;
  double calabi = 0.0;
  double ricci_eig_min = 0.0;  ///< relative to the background metric
  double ricci_eig_max = 0.0;
  double scalar_min = 0.0;
  double sup_phi = 0.0;
  double spectral_tail = 0.0;
  double volume = 0.0;       ///< ∫ ω_φⁿ
  double mean_scalar = 0.0;  ///< ∫ R ω_φⁿ / V, cross-checks μ
};

/// The evolving potential with metric and curvature caches.
struct FlowState {
  double t = 0.0;
  PotentialField phi;
  MetricField metric;
  CurvatureBundle curvature;
  DiagnosticsRecord diagnostics;
};

/// Build a consistent state from a potential (not renormalized here).
/// Throws NotKahlerError when the potential is outside the Kähler cone.
FlowState make_state(PotentialField phi, double t, double mu);

/// R(ω_φ) − μ.
ScalarField rhs(const FlowState& state, double mu);

/// Decay rate Λ_k = (π² Σ_a (k_a/period_a)²)² of mode k under φ_t = −Δ₀²φ,
/// Δ₀ the background complex Laplacian.
double linearized_rate(const TorusDomain& domain, std::span<const int> wavevector);

/// Largest Λ_k over resolved (non-Nyquist) modes.
double max_linearized_rate(const TorusDomain& domain);

/// dt bound for step_explicit_rk: c_stab / Λ_max.
double explicit_stability_limit(const TorusDomain& domain, double c_stab = 2.5);

/// First-order IMEX step: L = −Δ₀² implicit in Fourier space, the remainder
/// R − μ − Lφ explicit. The zero and Nyquist modes of the result are
/// cleared (mean normalization; Nyquist modes do not enter ∂∂̄).
/// Throws NotKahlerError if the step leaves the Kähler cone.
FlowState step_imex(const FlowState& state, double dt, double mu);

/// Classical RK4 on the full nonlinear right-hand side, with the same mode
/// clearing. Stable only for dt ≤ explicit_stability_limit.
FlowState step_explicit_rk(const FlowState& state, double dt, double mu);

struct FlowConfig {
  double dt_init = 1e-4;
  double dt_min = 1e-12;
  double dt_max = 1e-2;
  double dt_growth = 1.25;
  double t_max = 10.0;
  double stop_ca = 1e-12;
  double ca_slack = 1e-10;
  int warmup_steps = 10;
  double monitor_factor = 2.0;
  int record_every = 1;

  friend bool operator==(const FlowConfig&, const FlowConfig&) = default;
};

/// Throws DomainError for inconsistent settings.
void validate(const FlowConfig& config);

enum class Bound { none, lower, upper };

struct MonitorStatus {
  bool exited = false;
  int step = -1;
  double time = 0.0;
  Bound bound = Bound::none;
};

/// Runtime mirror of the continuation set: Ricci bounds K₃, K₄ are recorded
/// over the first `warmup_steps` accepted steps, after which the monitor
/// exits the first time Ric leaves [−factor·K₃, factor·K₄].
class TrapMonitor {
 public:
  TrapMonitor(int warmup_steps, double factor);

  const MonitorStatus& observe(const DiagnosticsRecord& record);

  bool armed() const noexcept { return observed_ >= warmup_steps_; }
  double k3() const noexcept { return k3_; }
  double k4() const noexcept { return k4_; }
  const MonitorStatus& status() const noexcept { return status_; }
  int warmup_steps() const noexcept { return warmup_steps_; }
  double factor() const noexcept { return factor_; }
  int observed() const noexcept { return observed_; }

  /// Restore from persisted fields.
  static TrapMonitor restore(int warmup_steps, double factor, int observed, double k3, double k4,
                             const MonitorStatus& status);

 private:
  int warmup_steps_;
  double factor_;
  int observed_ = 0;
  double k3_ = 0.0;
  double k4_ = 0.0;
  MonitorStatus status_;
};

std::string_view to_string(Bound b);

enum class Outcome { converged, monitor_exit, t_max, no_progress };

std::string_view to_string(Outcome o);

/// Everything besides the state needed to continue a run bit-identically.
struct RunProgress {
  int step = 0;
  double dt_next = 0.0;
  double initial_calabi = 0.0;
  int rejected = 0;
  TrapMonitor monitor{10, 2.0};
};

struct RunResult {
  Outcome outcome = Outcome::converged;
  std::vector<DiagnosticsRecord> trajectory;  ///< initial state + every accepted step
  std::vector<MonitorStatus> monitor_trace;   ///< status after each trajectory entry
  std::optional<FlowState> final_state;
  RunProgress progress;
};

/// Called with the state, the progress counters and the record after the
/// initial state and after every accepted step.
using StepObserver = std::function<void(const FlowState&, const RunProgress&, const DiagnosticsRecord&)>;

/// Adaptive Calabi flow from `initial` (mean-normalized first). A step is
/// rejected and dt halved when it leaves the Kähler cone, produces a
/// non-finite energy, or raises Ca by more than ca_slack·max(Ca, 1e-14).
/// Stops when Ca ≤ stop_ca, the monitor exits, t > t_max, or dt < dt_min.
/// Throws NotKahlerError when the initial potential is not admissible.
RunResult run(const PotentialField& initial, const FlowConfig& config, double mu, const StepObserver& observer = {});

/// Continue a run from a saved potential, time and progress.
RunResult resume(const PotentialField& phi, double t, const RunProgress& progress, const FlowConfig& config, double mu,
                 const StepObserver& observer = {});

}  // namespace calabi::flow
