#include "calabi/cli/commands.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "calabi/cli/checkpoint.hpp"
#include "calabi/functionals.hpp"

namespace calabi::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string output_dir(const RunConfig& config) {
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return config.output.dir;
}

std::string monitor_label(const flow::TrapMonitor& monitor) {
  const auto& s = monitor.status();
  if (s.exited) return "exited_" + std::string(flow::to_string(s.bound));
  return monitor.armed() ? "armed" : "warmup";
}

int exit_code(flow::Outcome outcome) {
  switch (outcome) {
    case flow::Outcome::converged: return kExitOk;
    case flow::Outcome::monitor_exit: return kExitMonitor;
    case flow::Outcome::t_max: return kExitTMax;
    default: return kExitNumerical;
  }
}

namespace {

std::string num(double x) { return fmt::format("{:.17g}", x); }

std::string join_ints(const std::vector<int>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(v[i]);
  }
  return out;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  return out;
}

// Config errors are reported the same way by every command.
template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const CheckpointError& e) {
    fmt::print(err, "checkpoint error: {}\n", e.what());
    return kExitConfig;
  } catch (const NotKahlerError& e) {
    fmt::print(err, "numerical failure: {}\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitNumerical;
  }
}

constexpr const char* kFlowHeader =
    "step,t,dt,calabi,ricci_eig_min,ricci_eig_max,scalar_min,sup_phi,spectral_tail,monitor_status\n";

std::string flow_row(const flow::DiagnosticsRecord& r, const std::string& monitor) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{}\n", r.step, num(r.t), num(r.dt_used), num(r.calabi),
                     num(r.ricci_eig_min), num(r.ricci_eig_max), num(r.scalar_min), num(r.sup_phi),
                     num(r.spectral_tail), monitor);
}

}  // namespace

int cmd_flow_run(const std::string& config_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig config = load_config(config_path);
    const TorusDomain domain = build_domain(config);
    const double mu = cohomology::mu(cohomology_data(config, domain));
    const std::uint64_t hash = dynamics_hash(config);

    std::optional<Checkpoint> resumed;
    PotentialField phi = PotentialField::zero(domain);
    if (!config.initial.checkpoint.empty()) {
      resumed = load_checkpoint(config.initial.checkpoint);
      if (resumed->config_hash != hash)
        throw ConfigError(config_path + ": checkpoint was written under different dynamics (domain, cohomology or flow settings)");
      phi = restore_potential(*resumed, domain);
    } else {
      phi = potential_from_modes(domain, config.initial.modes);
    }

    const fs::path dir = output_dir(config);
    fs::create_directories(dir);
    const fs::path base = dir / config.output.name;
    std::ofstream csv = open_output(base.string() + ".csv");
    csv << kFlowHeader;
    const std::string ckpt_path = base.string() + ".ckpt";

    int last_written = -1;
    double volume0 = 0.0;
    double volume_drift = 0.0;
    bool tail_warned = false;
    auto observer = [&](const flow::FlowState& state, const flow::RunProgress& progress,
                        const flow::DiagnosticsRecord& r) {
      if (volume0 == 0.0) volume0 = r.volume;
      volume_drift = std::max(volume_drift, std::abs(r.volume - volume0) / volume0);
      if (!tail_warned && r.spectral_tail > flow::kTailWarning) {
        fmt::print(err, "warning: spectral tail {} at step {} exceeds {}; the grid may be under-resolved\n",
                   num(r.spectral_tail), r.step, flow::kTailWarning);
        tail_warned = true;
      }
      if (r.step % config.flow.record_every == 0) {
        csv << flow_row(r, monitor_label(progress.monitor));
        last_written = r.step;
      }
      if (config.output.checkpoint_every > 0 && r.step > 0 && r.step % config.output.checkpoint_every == 0)
        save_checkpoint(ckpt_path, make_checkpoint(state, progress, hash));
    };

    const auto start = std::chrono::steady_clock::now();
    flow::RunResult result;
    try {
      result = resumed ? flow::resume(phi, resumed->t, resumed->progress, config.flow, mu, observer)
                       : flow::run(phi, config.flow, mu, observer);
    } catch (const NotKahlerError& e) {
      throw ConfigError(config_path + ": initial potential is outside the Kähler cone: " + e.what());
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const auto& final_state = *result.final_state;
    const auto& last = result.trajectory.back();
    if (last.step != last_written) csv << flow_row(last, monitor_label(result.progress.monitor));
    csv.close();
    save_checkpoint(ckpt_path, make_checkpoint(final_state, result.progress, hash));

    const auto& monitor = result.progress.monitor;
    json summary;
    summary["outcome"] = std::string(flow::to_string(result.outcome));
    summary["final_calabi"] = last.calabi;
    summary["initial_calabi"] = result.progress.initial_calabi;
    summary["calabi_ratio"] =
        result.progress.initial_calabi > 0.0 ? last.calabi / result.progress.initial_calabi : 0.0;
    summary["steps"] = result.progress.step;
    summary["rejected_steps"] = result.progress.rejected;
    summary["final_time"] = final_state.t;
    summary["final_sup_phi"] = last.sup_phi;
    summary["max_volume_drift"] = volume_drift;
    summary["mu"] = mu;
    summary["monitor"] = json{{"k3", monitor.k3()},
                              {"k4", monitor.k4()},
                              {"exited", monitor.status().exited},
                              {"exit_step", monitor.status().step},
                              {"bound", std::string(flow::to_string(monitor.status().bound))}};
    summary["resumed_from"] = config.initial.checkpoint;
    summary["wall_time_s"] = wall;
    std::ofstream(base.string() + ".summary.json", std::ios::trunc) << summary.dump(2) << "\n";

    fmt::print(out, "outcome {} after {} steps, t = {}, Ca {} -> {}\n", flow::to_string(result.outcome),
               result.progress.step, num(final_state.t), num(result.progress.initial_calabi), num(last.calabi));
    return exit_code(result.outcome);
  });
}

std::vector<SweepRow> run_sweep(const RunConfig& config) {
  const TorusDomain domain = build_domain(config);
  const double mu = cohomology::mu(cohomology_data(config, domain));

  std::vector<SweepRow> rows;
  for (const auto& k : config.sweep.wavevectors) {
    for (double a : config.sweep.amplitudes) {
      SweepRow row;
      row.wavevector = k;
      row.amplitude = a;
      rows.push_back(std::move(row));
    }
  }

  auto execute = [&](SweepRow& row) {
    try {
      const Mode mode{row.wavevector, row.amplitude, 0.0};
      const auto result = flow::run(potential_from_modes(domain, std::span(&mode, 1)), config.flow, mu);
      const auto& traj = result.trajectory;
      row.initial_calabi = traj.front().calabi;
      row.outcome = flow::to_string(result.outcome);
      row.final_calabi = traj.back().calabi;
      row.steps = result.progress.step;
      row.final_time = result.final_state->t;
      for (const auto& r : traj) {
        if (r.calabi <= 0.5 * row.initial_calabi) {
          row.time_to_half_energy = r.t;
          break;
        }
      }
    } catch (const std::exception& e) {
      row.outcome = "error";
      row.error = e.what();
    }
  };

  // Independent runs on a fixed pool; each worker owns the rows it claims.
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) execute(rows[i]);
  };
  const std::size_t threads = std::min<std::size_t>(config.sweep.threads, std::max<std::size_t>(rows.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return rows;
}

int cmd_sweep(const std::string& config_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig config = load_config(config_path);
    const auto rows = run_sweep(config);

    const fs::path dir = output_dir(config);
    fs::create_directories(dir);
    const fs::path path = dir / (config.output.name + ".sweep.csv");
    std::ofstream csv = open_output(path);
    csv << "wavevector,amplitude,initial_calabi,outcome,final_calabi,steps,final_time,time_to_half_energy\n";
    int errors = 0;
    for (const auto& r : rows) {
      csv << fmt::format("{},{},{},{},{},{},{},{}\n", join_ints(r.wavevector, ';'), num(r.amplitude),
                         num(r.initial_calabi), r.outcome, num(r.final_calabi), r.steps, num(r.final_time),
                         r.time_to_half_energy ? num(*r.time_to_half_energy) : std::string());
      if (r.outcome == "error") {
        ++errors;
        fmt::print(err, "run k=({}) a={} failed: {}\n", join_ints(r.wavevector, ','), num(r.amplitude), r.error);
      }
    }
    fmt::print(out, "{} runs ({} failed), report written to {}\n", rows.size(), errors, path.string());
    return kExitOk;
  });
}

std::vector<CheckRow> run_checks(const RunConfig& config) {
  const TorusDomain domain = build_domain(config);
  const auto data = cohomology_data(config, domain);
  const MetricField background = MetricField::background(domain);
  const estimates::GreensOptions greens{estimates::kIdentityTol, config.check.corrupt_greens_sign};

  std::vector<CheckRow> rows;
  auto check_pair = [&](const std::string& suite, const MetricField& omega_prime) {
    estimates::MetricPair pair(omega_prime, background);
    for (auto& r : estimates::run_suite(pair, greens)) rows.push_back({suite, std::move(r)});
    const EnergyReport e = decomposition_check(omega_prime, data);
    rows.push_back({suite,
                    {"decomposition", std::abs(e.decomposition_residual), 0.0, e.tolerance, e.within_tolerance()}});
  };

  if (config.check.include_flat) check_pair("flat", background);
  if (!config.initial.modes.empty())
    check_pair("initial", metric_from_potential(potential_from_modes(domain, config.initial.modes)));

  std::mt19937_64 rng(config.seed);
  AnalyticSampleOptions opts;
  opts.num_modes = config.check.num_modes;
  opts.max_wavenumber = config.check.max_wavenumber;
  opts.max_amplitude = config.check.max_amplitude;
  for (int i = 0; i < config.check.random_pairs; ++i) {
    const auto modes = sample_analytic_modes(domain, rng, opts);
    check_pair("random_" + std::to_string(i), metric_from_potential(potential_from_modes(domain, modes)));
  }
  return rows;
}

int cmd_check(const std::string& config_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig config = load_config(config_path);
    const auto rows = run_checks(config);

    const fs::path dir = output_dir(config);
    fs::create_directories(dir);
    const fs::path path = dir / (config.output.name + ".check.csv");
    std::ofstream csv = open_output(path);
    csv << "suite,check,residual_sup,residual_l2,tolerance,pass\n";
    fmt::print(out, "{:<10} {:<20} {:>24} {:>24} {:>10}  {}\n", "suite", "check", "residual_sup", "residual_l2",
               "tolerance", "result");
    int failures = 0;
    for (const auto& [suite, r] : rows) {
      csv << fmt::format("{},{},{},{},{},{}\n", suite, r.name, num(r.residual_sup), num(r.residual_l2),
                         num(r.tolerance), r.pass ? "true" : "false");
      fmt::print(out, "{:<10} {:<20} {:>24.17g} {:>24.17g} {:>10.3g}  {}\n", suite, r.name, r.residual_sup,
                 r.residual_l2, r.tolerance, r.pass ? "PASS" : "FAIL");
      if (!r.pass) ++failures;
    }
    fmt::print(out, "{} checks, {} failed\n", rows.size(), failures);
    return failures == 0 ? kExitOk : kExitCheckFailed;
  });
}

int cmd_cohomology(const CohomologyArgs& args, std::ostream& out, std::ostream& err) {
  const cohomology::CohomologyData data{args.n, args.c1w, args.c1sq, args.wn};
  if (args.n != 1 && args.n != 2) {
    fmt::print(err, "invalid pairings: n must be 1 or 2\n");
    return kExitConfig;
  }
  if (!(args.eps >= 0.0)) {
    fmt::print(err, "invalid pairings: eps must be nonnegative\n");
    return kExitConfig;
  }
  double mu = 0.0;
  double psi = 0.0;
  bool proportional = false;
  try {
    mu = cohomology::mu(data);
    proportional = cohomology::is_proportional(data);
    // Proportional classes have Ψ = 0 exactly; the formula would leave round-off.
    psi = proportional ? 0.0 : cohomology::psi(data);
  } catch (const DomainError& e) {
    fmt::print(err, "invalid pairings: {}\n", e.what());
    return kExitConfig;
  }
  fmt::print(out, "mu = {}\n", num(mu));
  fmt::print(out, "psi = {}\n", num(psi));
  if (proportional) fmt::print(out, "flag: proportional ([c1] and [omega] are proportional, psi = 0)\n");
  if (psi > 0.0) fmt::print(out, "flag: psi_positive (the energy decomposition has a positive topological floor)\n");
  if (psi <= -args.eps) fmt::print(out, "flag: psi_below_minus_eps (psi <= -{})\n", num(args.eps));
  return kExitOk;
}

}  // namespace calabi::cli
