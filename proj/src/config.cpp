#include "chanstab/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include <toml.hpp>

namespace chanstab {

namespace {

int line_of(const toml::node& node) { return static_cast<int>(node.source().begin.line); }

[[noreturn]] void fail(const toml::node& node, const std::string& field, const std::string& what) {
  throw ConfigError("line " + std::to_string(line_of(node)) + ": " + field + ": " + what,
                    line_of(node));
}

double as_double(const toml::node& node, const std::string& field) {
  if (!node.is_number()) fail(node, field, "expected a number");
  return *node.value<double>();
}

double as_positive(const toml::node& node, const std::string& field) {
  const double v = as_double(node, field);
  if (!(v > 0.0) || !std::isfinite(v)) fail(node, field, "expected a positive number");
  return v;
}

std::int64_t as_integer(const toml::node& node, const std::string& field) {
  if (!node.is_integer()) fail(node, field, "expected an integer");
  return *node.value<std::int64_t>();
}

int as_int(const toml::node& node, const std::string& field) {
  const std::int64_t v = as_integer(node, field);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    fail(node, field, "integer out of range");
  }
  return static_cast<int>(v);
}

std::string as_string(const toml::node& node, const std::string& field) {
  if (!node.is_string()) fail(node, field, "expected a string");
  return *node.value<std::string>();
}

bool as_bool(const toml::node& node, const std::string& field) {
  if (!node.is_boolean()) fail(node, field, "expected true or false");
  return *node.value<bool>();
}

template <typename T, typename Read>
std::vector<T> as_list(const toml::node& node, const std::string& field, Read read) {
  std::vector<T> out;
  if (const toml::array* arr = node.as_array()) {
    if (arr->empty()) fail(node, field, "list must not be empty");
    for (const toml::node& item : *arr) out.push_back(read(item, field));
  } else {
    out.push_back(read(node, field));
  }
  return out;
}

OperatorKind as_kind(const toml::node& node, const std::string& field) {
  const std::string s = as_string(node, field);
  if (s == "orr_sommerfeld") return OperatorKind::orr_sommerfeld;
  if (s == "advection_diffusion") return OperatorKind::advection_diffusion;
  if (s == "diffusion") return OperatorKind::diffusion;
  fail(node, field, "unknown operator kind '" + s + "'");
}

using Setter = std::function<void(const toml::node&, const std::string&)>;

}  // namespace

std::vector<double> Config::coefficients(OperatorKind kind) const {
  if (kind == OperatorKind::orr_sommerfeld || physics.mu.empty()) return physics.nu;
  return physics.mu;
}

double Config::mu_for(std::size_t i) const {
  if (physics.mu.empty()) return physics.nu.at(i);
  if (physics.mu.size() == 1) return physics.mu[0];
  return physics.mu.at(i);
}

Config parse_config(const std::string& text, const std::string& origin) {
  toml::table root;
  try {
    root = toml::parse(text, origin);
  } catch (const toml::parse_error& e) {
    const int line = static_cast<int>(e.source().begin.line);
    throw ConfigError("line " + std::to_string(line) + ": " + std::string(e.description()), line);
  }

  Config c;
  std::map<std::string, std::map<std::string, Setter>> schema;
  schema["grid"]["n"] = [&](auto& v, auto& f) { c.grid.n = as_int(v, f); };

  auto& physics = schema["physics"];
  physics["nu"] = [&](auto& v, auto& f) { c.physics.nu = as_list<double>(v, f, as_positive); };
  physics["mu"] = [&](auto& v, auto& f) { c.physics.mu = as_list<double>(v, f, as_positive); };
  physics["k"] = [&](auto& v, auto& f) { c.physics.k = as_list<int>(v, f, as_int); };
  physics["kind"] = [&](auto& v, auto& f) { c.physics.kind = as_kind(v, f); };

  auto& sweep = schema["sweep"];
  sweep["lambda_min"] = [&](auto& v, auto& f) { c.sweep.lambda_min = as_double(v, f); };
  sweep["lambda_max"] = [&](auto& v, auto& f) { c.sweep.lambda_max = as_double(v, f); };
  sweep["samples"] = [&](auto& v, auto& f) { c.sweep.samples = as_int(v, f); };
  sweep["horizon_factor"] = [&](auto& v, auto& f) { c.sweep.horizon_factor = as_double(v, f); };
  sweep["time_samples"] = [&](auto& v, auto& f) { c.sweep.time_samples = as_int(v, f); };
  sweep["gp_factor"] = [&](auto& v, auto& f) { c.sweep.gp_factor = as_double(v, f); };
  sweep["gp_samples"] = [&](auto& v, auto& f) { c.sweep.gp_samples = as_int(v, f); };
  sweep["os_bounds"] = [&](auto& v, auto& f) { c.sweep.os_bounds = as_bool(v, f); };

  auto& sim = schema["simulation"];
  sim["K"] = [&](auto& v, auto& f) { c.simulation.K = as_int(v, f); };
  sim["dt"] = [&](auto& v, auto& f) { c.simulation.dt = as_double(v, f); };
  sim["horizon"] = [&](auto& v, auto& f) { c.simulation.horizon = as_double(v, f); };
  sim["c0"] = [&](auto& v, auto& f) { c.simulation.c0 = as_double(v, f); };
  sim["c1"] = [&](auto& v, auto& f) { c.simulation.c1 = as_double(v, f); };
  sim["seed"] = [&](auto& v, auto& f) {
    const std::int64_t s = as_integer(v, f);
    if (s < 0) fail(v, f, "seed must be >= 0");
    c.simulation.seed = static_cast<std::uint64_t>(s);
  };
  sim["sobolev_s"] = [&](auto& v, auto& f) { c.simulation.sobolev_s = as_double(v, f); };
  sim["ledger_every"] = [&](auto& v, auto& f) { c.simulation.ledger_every = as_int(v, f); };
  sim["shape"] = [&](auto& v, auto& f) {
    c.simulation.shape = as_string(v, f);
    if (c.simulation.shape != "random_band" && c.simulation.shape != "single_mode") {
      fail(v, f, "expected 'random_band' or 'single_mode'");
    }
  };
  sim["mode"] = [&](auto& v, auto& f) { c.simulation.mode = as_int(v, f); };

  auto& bis = schema["bisection"];
  bis["lo"] = [&](auto& v, auto& f) { c.bisection.lo = as_double(v, f); };
  bis["hi"] = [&](auto& v, auto& f) { c.bisection.hi = as_double(v, f); };
  bis["tol"] = [&](auto& v, auto& f) { c.bisection.tol = as_double(v, f); };
  bis["oracle"] = [&](auto& v, auto& f) {
    c.bisection.oracle = as_string(v, f);
    if (c.bisection.oracle != "simulation" && c.bisection.oracle != "synthetic") {
      fail(v, f, "expected 'simulation' or 'synthetic'");
    }
  };
  bis["synthetic_gamma"] = [&](auto& v, auto& f) { c.bisection.synthetic_gamma = as_double(v, f); };

  schema["bootstrap"]["input"] = [&](auto& v, auto& f) { c.bootstrap.input = as_string(v, f); };

  for (auto&& [section_key, section_node] : root) {
    const std::string section(section_key.str());
    const auto it = schema.find(section);
    if (it == schema.end()) fail(section_node, section, "unknown section");
    const toml::table* table = section_node.as_table();
    if (!table) fail(section_node, section, "expected a [section]");
    for (auto&& [key, node] : *table) {
      const std::string field = section + "." + std::string(key.str());
      const auto setter = it->second.find(std::string(key.str()));
      if (setter == it->second.end()) fail(node, field, "unknown key");
      setter->second(node, field);
    }
  }
  if (c.physics.mu.size() > 1 && c.physics.mu.size() != c.physics.nu.size()) {
    throw ConfigError("physics.mu: expected one entry or as many entries as physics.nu");
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path);
}

nlohmann::json Config::to_json() const {
  nlohmann::json j;
  j["grid"] = {{"n", grid.n}};
  j["physics"] = {{"nu", physics.nu},
                  {"mu", physics.mu},
                  {"k", physics.k},
                  {"kind", to_string(physics.kind)}};
  j["sweep"] = {{"samples", sweep.samples},
                {"horizon_factor", sweep.horizon_factor},
                {"time_samples", sweep.time_samples},
                {"gp_factor", sweep.gp_factor},
                {"gp_samples", sweep.gp_samples},
                {"os_bounds", sweep.os_bounds}};
  if (sweep.lambda_min) j["sweep"]["lambda_min"] = *sweep.lambda_min;
  if (sweep.lambda_max) j["sweep"]["lambda_max"] = *sweep.lambda_max;
  j["simulation"] = {{"K", simulation.K},
                     {"dt", simulation.dt},
                     {"horizon", simulation.horizon},
                     {"c0", simulation.c0},
                     {"c1", simulation.c1},
                     {"seed", simulation.seed},
                     {"sobolev_s", simulation.sobolev_s},
                     {"ledger_every", simulation.ledger_every},
                     {"shape", simulation.shape},
                     {"mode", simulation.mode}};
  j["bisection"] = {{"lo", bisection.lo},
                    {"hi", bisection.hi},
                    {"tol", bisection.tol},
                    {"oracle", bisection.oracle},
                    {"synthetic_gamma", bisection.synthetic_gamma}};
  j["bootstrap"] = {{"input", bootstrap.input}};
  return j;
}

}  // namespace chanstab
