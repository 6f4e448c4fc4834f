#include "calabi/cli/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace calabi::cli {

namespace {

constexpr char kMagic[8] = {'C', 'A', 'L', 'B', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kByteOrderTag = 0x01020304;

class Writer {
 public:
  explicit Writer(std::ofstream& out) : out_(out) {}
  template <class T>
  void put(const T& v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }

 private:
  std::ofstream& out_;
};

class Reader {
 public:
  Reader(std::ifstream& in, const std::string& path) : in_(in), path_(path) {}
  template <class T>
  T get() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_) throw CheckpointError(path_ + ": truncated checkpoint");
    return v;
  }

 private:
  std::ifstream& in_;
  const std::string& path_;
};

}  // namespace

Checkpoint make_checkpoint(const flow::FlowState& state, const flow::RunProgress& progress, std::uint64_t hash) {
  const auto& domain = state.phi.domain();
  Checkpoint ck;
  ck.config_hash = hash;
  ck.t = state.t;
  ck.progress = progress;
  ck.n = domain.complex_dim();
  ck.grid_size = domain.grid_size();
  ck.periods.assign(domain.periods().begin(), domain.periods().end());
  ck.spectrum = state.phi.spectrum();
  return ck;
}

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError(path + ": cannot write checkpoint");
    Writer w(out);
    out.write(kMagic, sizeof kMagic);
    w.put(kCheckpointVersion);
    w.put(kByteOrderTag);
    w.put(ck.config_hash);
    w.put(ck.t);
    const auto& p = ck.progress;
    w.put(static_cast<std::int64_t>(p.step));
    w.put(p.dt_next);
    w.put(p.initial_calabi);
    w.put(static_cast<std::int64_t>(p.rejected));
    const auto& m = p.monitor;
    w.put(static_cast<std::int64_t>(m.warmup_steps()));
    w.put(m.factor());
    w.put(static_cast<std::int64_t>(m.observed()));
    w.put(m.k3());
    w.put(m.k4());
    w.put(static_cast<std::uint8_t>(m.status().exited));
    w.put(static_cast<std::int64_t>(m.status().step));
    w.put(m.status().time);
    w.put(static_cast<std::int32_t>(m.status().bound));
    w.put(static_cast<std::int32_t>(ck.n));
    w.put(static_cast<std::int32_t>(ck.grid_size));
    w.put(static_cast<std::uint64_t>(ck.periods.size()));
    for (double x : ck.periods) w.put(x);
    w.put(static_cast<std::uint64_t>(ck.spectrum.size()));
    out.write(reinterpret_cast<const char*>(ck.spectrum.data()),
              static_cast<std::streamsize>(ck.spectrum.size() * sizeof(std::complex<double>)));
    if (!out) throw CheckpointError(path + ": write failed");
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(path + ": cannot open checkpoint");
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw CheckpointError(path + ": not a checkpoint file");
  Reader r(in, path);
  if (const auto v = r.get<std::uint32_t>(); v != kCheckpointVersion)
    throw CheckpointError(path + ": unsupported checkpoint version " + std::to_string(v));
  if (r.get<std::uint32_t>() != kByteOrderTag) throw CheckpointError(path + ": byte order mismatch");

  Checkpoint ck;
  ck.config_hash = r.get<std::uint64_t>();
  ck.t = r.get<double>();
  auto& p = ck.progress;
  p.step = static_cast<int>(r.get<std::int64_t>());
  p.dt_next = r.get<double>();
  p.initial_calabi = r.get<double>();
  p.rejected = static_cast<int>(r.get<std::int64_t>());
  const int warmup = static_cast<int>(r.get<std::int64_t>());
  const double factor = r.get<double>();
  const int observed = static_cast<int>(r.get<std::int64_t>());
  const double k3 = r.get<double>();
  const double k4 = r.get<double>();
  flow::MonitorStatus status;
  status.exited = r.get<std::uint8_t>() != 0;
  status.step = static_cast<int>(r.get<std::int64_t>());
  status.time = r.get<double>();
  const auto bound = r.get<std::int32_t>();
  if (bound < 0 || bound > 2) throw CheckpointError(path + ": corrupt monitor state");
  status.bound = static_cast<flow::Bound>(bound);
  p.monitor = flow::TrapMonitor::restore(warmup, factor, observed, k3, k4, status);
  ck.n = r.get<std::int32_t>();
  ck.grid_size = r.get<std::int32_t>();
  const auto np = r.get<std::uint64_t>();
  if (np > 4) throw CheckpointError(path + ": corrupt period list");
  for (std::uint64_t i = 0; i < np; ++i) ck.periods.push_back(r.get<double>());
  const auto nm = r.get<std::uint64_t>();
  if (nm > (std::uint64_t{1} << 32)) throw CheckpointError(path + ": corrupt spectrum size");
  ck.spectrum.resize(nm);
  in.read(reinterpret_cast<char*>(ck.spectrum.data()), static_cast<std::streamsize>(nm * sizeof(std::complex<double>)));
  if (!in) throw CheckpointError(path + ": truncated checkpoint");
  return ck;
}

PotentialField restore_potential(const Checkpoint& ck, const TorusDomain& domain) {
  const auto periods = domain.periods();
  if (ck.n != domain.complex_dim() || ck.grid_size != domain.grid_size() ||
      !std::equal(ck.periods.begin(), ck.periods.end(), periods.begin(), periods.end()) ||
      ck.spectrum.size() != domain.num_modes())
    throw CheckpointError("checkpoint grid does not match the configured domain");
  return PotentialField::from_spectrum(domain, ck.spectrum);
}

}  // namespace calabi::cli
