#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "calabi/fft.hpp"
#include "calabi/flow.hpp"

namespace calabi::cli {

inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything needed to continue a flow bit-identically: the raw half
/// spectrum of φ, the clock, step-size controller and monitor state.
struct Checkpoint {
  std::uint64_t config_hash = 0;
  double t = 0.0;
  flow::RunProgress progress;
  int n = 1;
  int grid_size = 0;
  std::vector<double> periods;
  ComplexBuffer spectrum;
};

Checkpoint make_checkpoint(const flow::FlowState& state, const flow::RunProgress& progress, std::uint64_t hash);

/// Written to a temporary file and renamed into place.
void save_checkpoint(const std::string& path, const Checkpoint& ck);

/// Throws CheckpointError on a bad magic, version, byte order or truncation.
Checkpoint load_checkpoint(const std::string& path);

/// The potential stored in `ck`; throws CheckpointError when the grid does
/// not match `domain`.
PotentialField restore_potential(const Checkpoint& ck, const TorusDomain& domain);

}  // namespace calabi::cli
