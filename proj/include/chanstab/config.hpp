#pragma once

// Run configuration: one TOML file per command with the sections
// [grid], [physics], [sweep], [simulation], [bisection], [bootstrap].
// Unknown sections or keys are rejected.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "chanstab/operators.hpp"

namespace chanstab {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0) : std::runtime_error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct Config {
  struct Grid {
    int n = 64;
  } grid;

  struct Physics {
    std::vector<double> nu{1e-3};
    std::vector<double> mu;  // empty: same as nu
    std::vector<int> k{1};
    OperatorKind kind = OperatorKind::advection_diffusion;  // psi and semigroup
  } physics;

  struct Sweep {
    std::optional<double> lambda_min;  // default: [-4|k|, 5|k|]
    std::optional<double> lambda_max;
    int samples = 201;
    double horizon_factor = 10.0;  // decay horizon = factor / sqrt(coeff)
    int time_samples = 60;
    double gp_factor = 3.0;        // Gearhart-Pruss window [0, factor / sqrt(coeff)]
    int gp_samples = 50;
    bool os_bounds = true;
  } sweep;

  struct Simulation {
    int K = 16;
    double dt = 0.0;
    double horizon = 0.0;
    double c0 = 1e-3;
    double c1 = 1e-3;
    std::uint64_t seed = 0;
    double sobolev_s = 3.6;
    int ledger_every = 0;
    std::string shape = "random_band";  // or "single_mode"
    int mode = 1;
  } simulation;

  struct Bisection {
    double lo = 1e-6;
    double hi = 1.0;
    double tol = 0.05;
    std::string oracle = "simulation";  // or "synthetic"
    double synthetic_gamma = 2.0 / 3.0;
  } bisection;

  struct Bootstrap {
    std::string input;  // output directory of a simulate run
  } bootstrap;

  /// Coefficients swept for an operator kind: nu for Orr-Sommerfeld, otherwise mu.
  std::vector<double> coefficients(OperatorKind kind) const;
  /// mu paired with nu[i] (mu[i] if given, else nu[i]).
  double mu_for(std::size_t i) const;

  nlohmann::json to_json() const;
};

/// `origin` names the source in diagnostics.
Config parse_config(const std::string& text, const std::string& origin = "config");
Config load_config(const std::string& path);

}  // namespace chanstab
