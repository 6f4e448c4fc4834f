#include "calabi/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace calabi::cli {

using json = nlohmann::ordered_json;

ConfigError::ConfigError(const std::string& message, int line) : std::runtime_error(message), line_(line) {}

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Best-effort source position of a key path: each key is searched for as a
// quoted string after the previous one. Array indices are skipped.
int locate(const std::string& text, const std::vector<std::string>& path) {
  std::size_t pos = 0;
  bool found = false;
  for (const auto& key : path) {
    if (!key.empty() && key.front() == '[') continue;
    const auto hit = text.find('"' + key + '"', pos);
    if (hit == std::string::npos) break;
    pos = hit;
    found = true;
  }
  return found ? line_of_offset(text, pos) : 0;
}

std::string join(const std::vector<std::string>& path) {
  std::string out;
  for (const auto& k : path) {
    if (!out.empty() && k.front() != '[') out += '.';
    out += k;
  }
  return out.empty() ? "<root>" : out;
}

struct Context {
  const std::string& text;
  const std::string& source;

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& what) const {
    const int line = locate(text, path);
    throw ConfigError(source + ":" + std::to_string(line) + ": " + join(path) + ": " + what, line);
  }
};

// A JSON object whose keys must all be consumed.
class Object {
 public:
  Object(const Context& ctx, const json& j, std::vector<std::string> path) : ctx_(ctx), j_(j), path_(std::move(path)) {
    if (!j_.is_object()) ctx_.fail(path_, "expected an object");
  }

  std::vector<std::string> path(const std::string& key) const {
    auto p = path_;
    p.push_back(key);
    return p;
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& require(const std::string& key) {
    const json* v = find(key);
    if (!v) ctx_.fail(path_, "missing required key '" + key + "'");
    return *v;
  }

  void read(const std::string& key, double& out) {
    if (const json* v = find(key)) out = number(*v, path(key));
  }

  void read(const std::string& key, int& out) {
    if (const json* v = find(key)) out = integer(*v, path(key));
  }

  void read(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) ctx_.fail(path(key), "expected a nonnegative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void read(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) ctx_.fail(path(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void read(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) ctx_.fail(path(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) ctx_.fail(path(key), "unknown key");
    }
  }

  double number(const json& v, const std::vector<std::string>& p) const {
    if (!v.is_number()) ctx_.fail(p, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) ctx_.fail(p, "expected a finite number");
    return x;
  }

  int integer(const json& v, const std::vector<std::string>& p) const {
    if (!v.is_number_integer()) ctx_.fail(p, "expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < -(1LL << 30) || x > (1LL << 30)) ctx_.fail(p, "integer out of range");
    return static_cast<int>(x);
  }

  std::vector<int> int_list(const json& v, const std::vector<std::string>& p) const {
    if (!v.is_array()) ctx_.fail(p, "expected an array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(integer(v[i], p));
    return out;
  }

  std::vector<double> number_list(const json& v, const std::vector<std::string>& p) const {
    if (!v.is_array()) ctx_.fail(p, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], p));
    return out;
  }

  const Context& ctx() const { return ctx_; }

 private:
  const Context& ctx_;
  const json& j_;
  std::vector<std::string> path_;
  std::set<std::string> seen_;
};

void read_domain(Object o, DomainSpec& d) {
  o.read("n", d.n);
  o.read("N", d.grid_size);
  if (const json* v = o.find("periods")) d.periods = o.number_list(*v, o.path("periods"));
  o.require("n");
  o.require("N");
  o.finish();
}

void read_modes(Object& parent, const json& arr, std::vector<Mode>& modes, int real_dim) {
  const auto base = parent.path("modes");
  if (!arr.is_array()) parent.ctx().fail(base, "expected an array of modes");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    auto p = base;
    p.push_back("[" + std::to_string(i) + "]");
    Object m(parent.ctx(), arr[i], p);
    Mode mode;
    mode.wavevector = m.int_list(m.require("k"), m.path("k"));
    if (static_cast<int>(mode.wavevector.size()) != real_dim)
      parent.ctx().fail(m.path("k"), "wavevector needs " + std::to_string(real_dim) + " components");
    m.require("amplitude");
    m.read("amplitude", mode.amplitude);
    m.read("phase", mode.phase);
    m.finish();
    modes.push_back(std::move(mode));
  }
}

void read_flow(Object o, flow::FlowConfig& f) {
  o.read("dt_init", f.dt_init);
  o.read("dt_min", f.dt_min);
  o.read("dt_max", f.dt_max);
  o.read("dt_growth", f.dt_growth);
  o.read("t_max", f.t_max);
  o.read("stop_ca", f.stop_ca);
  o.read("ca_slack", f.ca_slack);
  o.read("warmup_steps", f.warmup_steps);
  o.read("monitor_factor", f.monitor_factor);
  o.read("record_every", f.record_every);
  o.finish();
  try {
    flow::validate(f);
  } catch (const DomainError& e) {
    o.ctx().fail({"flow"}, e.what());
  }
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const int line = line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError(source + ":" + std::to_string(line) + ": syntax error: " + e.what(), line);
  }

  const Context ctx{text, source};
  Object top(ctx, root, {});
  RunConfig c;

  top.read("schema_version", c.schema_version);
  top.require("schema_version");
  if (c.schema_version != kSchemaVersion)
    ctx.fail({"schema_version"}, "unsupported schema version " + std::to_string(c.schema_version) + " (expected " +
                                     std::to_string(kSchemaVersion) + ")");

  read_domain(Object(ctx, top.require("domain"), {"domain"}), c.domain);
  TorusDomain domain = [&] {
    try {
      return build_domain(c);
    } catch (const DomainError& e) {
      ctx.fail({"domain"}, e.what());
    }
  }();

  if (const json* v = top.find("initial")) {
    Object o(ctx, *v, {"initial"});
    if (const json* m = o.find("modes")) read_modes(o, *m, c.initial.modes, domain.real_dim());
    o.read("checkpoint", c.initial.checkpoint);
    o.finish();
    if (!c.initial.modes.empty() && !c.initial.checkpoint.empty())
      ctx.fail({"initial"}, "give either modes or a checkpoint, not both");
    if (!c.initial.modes.empty()) {
      try {
        (void)potential_from_modes(domain, c.initial.modes);
      } catch (const DomainError& e) {
        ctx.fail({"initial", "modes"}, e.what());
      }
    }
  }

  if (const json* v = top.find("flow")) read_flow(Object(ctx, *v, {"flow"}), c.flow);

  if (const json* v = top.find("cohomology")) {
    Object o(ctx, *v, {"cohomology"});
    cohomology::CohomologyData d = cohomology::torus(domain);
    o.read("c1_w", d.c1_w_nm1);
    o.read("c1sq", d.c1sq_w_nm2);
    o.read("w_n", d.w_n);
    o.finish();
    try {
      cohomology::validate(d);
    } catch (const DomainError& e) {
      ctx.fail({"cohomology"}, e.what());
    }
    c.cohomology = d;
  }

  if (const json* v = top.find("output")) {
    Object o(ctx, *v, {"output"});
    o.read("dir", c.output.dir);
    o.read("name", c.output.name);
    o.read("checkpoint_every", c.output.checkpoint_every);
    o.finish();
    if (c.output.dir.empty()) ctx.fail({"output", "dir"}, "must not be empty");
    if (c.output.name.empty() || c.output.name.find('/') != std::string::npos)
      ctx.fail({"output", "name"}, "must be a nonempty file stem without '/'");
    if (c.output.checkpoint_every < 0) ctx.fail({"output", "checkpoint_every"}, "must be >= 0");
  }

  top.read("seed", c.seed);

  if (const json* v = top.find("sweep")) {
    Object o(ctx, *v, {"sweep"});
    if (const json* w = o.find("wavevectors")) {
      if (!w->is_array()) ctx.fail({"sweep", "wavevectors"}, "expected an array of wavevectors");
      for (const auto& k : *w) {
        auto vec = o.int_list(k, {"sweep", "wavevectors"});
        if (static_cast<int>(vec.size()) != domain.real_dim())
          ctx.fail({"sweep", "wavevectors"}, "wavevector needs " + std::to_string(domain.real_dim()) + " components");
        c.sweep.wavevectors.push_back(std::move(vec));
      }
    }
    if (const json* a = o.find("amplitudes")) c.sweep.amplitudes = o.number_list(*a, {"sweep", "amplitudes"});
    o.read("threads", c.sweep.threads);
    o.finish();
    if (c.sweep.threads < 1) ctx.fail({"sweep", "threads"}, "must be >= 1");
  }

  if (const json* v = top.find("check")) {
    Object o(ctx, *v, {"check"});
    o.read("include_flat", c.check.include_flat);
    o.read("random_pairs", c.check.random_pairs);
    o.read("num_modes", c.check.num_modes);
    o.read("max_wavenumber", c.check.max_wavenumber);
    o.read("max_amplitude", c.check.max_amplitude);
    o.read("corrupt_greens_sign", c.check.corrupt_greens_sign);
    o.finish();
    if (c.check.random_pairs < 0) ctx.fail({"check", "random_pairs"}, "must be >= 0");
    if (c.check.num_modes < 1) ctx.fail({"check", "num_modes"}, "must be >= 1");
    if (c.check.max_wavenumber < 1 || c.check.max_wavenumber >= domain.grid_size() / 2)
      ctx.fail({"check", "max_wavenumber"}, "must lie in [1, N/2)");
    if (!(c.check.max_amplitude > 0.0)) ctx.fail({"check", "max_amplitude"}, "must be positive");
  }

  top.finish();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

namespace {

json mode_json(const Mode& m) { return json{{"k", m.wavevector}, {"amplitude", m.amplitude}, {"phase", m.phase}}; }

json flow_json(const flow::FlowConfig& f, bool with_t_max) {
  json j;
  j["dt_init"] = f.dt_init;
  j["dt_min"] = f.dt_min;
  j["dt_max"] = f.dt_max;
  j["dt_growth"] = f.dt_growth;
  if (with_t_max) j["t_max"] = f.t_max;
  j["stop_ca"] = f.stop_ca;
  j["ca_slack"] = f.ca_slack;
  j["warmup_steps"] = f.warmup_steps;
  j["monitor_factor"] = f.monitor_factor;
  j["record_every"] = f.record_every;
  return j;
}

json domain_json(const DomainSpec& d) {
  json j{{"n", d.n}, {"N", d.grid_size}};
  if (!d.periods.empty()) j["periods"] = d.periods;
  return j;
}

json cohomology_json(const cohomology::CohomologyData& d) {
  return json{{"c1_w", d.c1_w_nm1}, {"c1sq", d.c1sq_w_nm2}, {"w_n", d.w_n}};
}

}  // namespace

std::string to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["domain"] = domain_json(c.domain);
  json initial = json::object();
  json modes = json::array();
  for (const auto& m : c.initial.modes) modes.push_back(mode_json(m));
  initial["modes"] = modes;
  if (!c.initial.checkpoint.empty()) initial["checkpoint"] = c.initial.checkpoint;
  j["initial"] = initial;
  j["flow"] = flow_json(c.flow, true);
  if (c.cohomology) j["cohomology"] = cohomology_json(*c.cohomology);
  j["output"] = json{{"dir", c.output.dir}, {"name", c.output.name}, {"checkpoint_every", c.output.checkpoint_every}};
  j["seed"] = c.seed;
  j["sweep"] = json{{"wavevectors", c.sweep.wavevectors}, {"amplitudes", c.sweep.amplitudes}, {"threads", c.sweep.threads}};
  j["check"] = json{{"include_flat", c.check.include_flat},
                    {"random_pairs", c.check.random_pairs},
                    {"num_modes", c.check.num_modes},
                    {"max_wavenumber", c.check.max_wavenumber},
                    {"max_amplitude", c.check.max_amplitude},
                    {"corrupt_greens_sign", c.check.corrupt_greens_sign}};
  return j.dump(2) + "\n";
}

TorusDomain build_domain(const RunConfig& config) {
  return calabi::make_domain(config.domain.n, config.domain.grid_size, config.domain.periods);
}

cohomology::CohomologyData cohomology_data(const RunConfig& config, const TorusDomain& domain) {
  return config.cohomology ? *config.cohomology : cohomology::torus(domain);
}

std::uint64_t dynamics_hash(const RunConfig& config) {
  const TorusDomain domain = build_domain(config);
  json j;
  j["domain"] = domain_json(config.domain);
  j["cohomology"] = cohomology_json(cohomology_data(config, domain));
  j["flow"] = flow_json(config.flow, false);
  const std::string s = j.dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace calabi::cli
