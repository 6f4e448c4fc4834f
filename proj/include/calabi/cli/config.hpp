#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "calabi/cohomology.hpp"
#include "calabi/domain.hpp"
#include "calabi/fields.hpp"
#include "calabi/flow.hpp"

namespace calabi::cli {

inline constexpr int kSchemaVersion = 1;

/// Malformed or invalid configuration. `line` is 0 when no position is known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line = 0);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct DomainSpec {
  int n = 1;
  int grid_size = 64;
  std::vector<double> periods;  ///< empty: unit periods

  friend bool operator==(const DomainSpec&, const DomainSpec&) = default;
};

/// Either a mode list or a checkpoint to resume from (not both).
struct InitialSpec {
  std::vector<Mode> modes;
  std::string checkpoint;

  friend bool operator==(const InitialSpec&, const InitialSpec&) = default;
};

struct OutputSpec {
  std::string dir = "out";
  std::string name = "run";
  int checkpoint_every = 0;  ///< accepted steps between checkpoints; 0 = final only

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

/// Grid of single-mode runs: every wavevector crossed with every amplitude.
struct SweepSpec {
  std::vector<std::vector<int>> wavevectors;
  std::vector<double> amplitudes;
  int threads = 1;

  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct CheckSpec {
  bool include_flat = true;
  int random_pairs = 3;
  int num_modes = 3;
  int max_wavenumber = 2;
  double max_amplitude = 1e-2;
  bool corrupt_greens_sign = false;

  friend bool operator==(const CheckSpec&, const CheckSpec&) = default;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  DomainSpec domain;
  InitialSpec initial;
  flow::FlowConfig flow;
  /// Intersection data; the flat torus values when absent.
  std::optional<cohomology::CohomologyData> cohomology;
  OutputSpec output;
  std::uint64_t seed = 0;
  SweepSpec sweep;
  CheckSpec check;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parse and validate. Unknown keys, wrong types and out-of-range values are
/// errors; messages are prefixed with "<source>:<line>:".
RunConfig parse_config(const std::string& text, const std::string& source = "config");
RunConfig load_config(const std::string& path);

/// Canonical JSON text; parse_config(to_json(c)) == c.
std::string to_json(const RunConfig& config);

TorusDomain build_domain(const RunConfig& config);
cohomology::CohomologyData cohomology_data(const RunConfig& config, const TorusDomain& domain);

/// FNV-1a over the canonical form of everything that shapes a trajectory
/// (domain, cohomology, flow settings except t_max). Checkpoints carry it so
/// a resume under different dynamics is refused.
std::uint64_t dynamics_hash(const RunConfig& config);

}  // namespace calabi::cli
