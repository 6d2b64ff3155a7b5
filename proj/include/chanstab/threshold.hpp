#pragma once

// Stability verdicts for nonlinear runs and geometric bisection of the
// transition amplitude between a stable and an unstable bracket end.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chanstab/nonlinear_sim.hpp"
#include "chanstab/resolvent.hpp"

namespace chanstab {

enum class Verdict { stable, unstable };

const char* to_string(Verdict v);

/// Both bracket ends returned the same verdict (or the bracket is degenerate).
class BracketError : public std::runtime_error {
 public:
  BracketError(Verdict lo, Verdict hi, const std::string& what)
      : std::runtime_error(what), lo_(lo), hi_(hi) {}
  Verdict lo_verdict() const noexcept { return lo_; }
  Verdict hi_verdict() const noexcept { return hi_; }

 private:
  Verdict lo_;
  Verdict hi_;
};

struct VerdictDetail {
  Verdict verdict = Verdict::stable;
  double ratio = 0.0;    // growth ratio at the final horizon used
  double horizon = 0.0;
  bool diverged = false;
};

/// Stable: no divergence and sum_k (E_k + H_k) <= 4 x its initial-data terms.
/// Unstable: divergence or ratio >= 10. In between the horizon is doubled, at
/// most twice; a run still undecided after that counts as unstable.
VerdictDetail classify_run(const SimConfig& config, const PerturbationState& initial);

/// Verdict as a function of (nu, mu, amplitude).
using VerdictOracle = std::function<Verdict(double nu, double mu, double amplitude)>;

/// Runs the simulation with random-band data of velocity amplitude `amplitude`
/// and temperature amplitude c1 min(nu, mu)^{31/24}, all other fields from base.
VerdictOracle simulation_oracle(const SimConfig& base, InitialShape shape = InitialShape::random_band());

struct ThresholdPoint {
  double nu = 0.0;
  double mu = 0.0;
  double amplitude_star = 0.0;  // sqrt(lo * hi) of the final bracket
  double lo = 0.0;              // largest amplitude found stable
  double hi = 0.0;              // smallest amplitude found unstable
  double verdict_margin = 0.0;  // hi / lo - 1
  int evaluations = 0;
};

/// Geometric bisection until hi / lo - 1 <= tol. Throws BracketError unless lo
/// is stable and hi unstable.
ThresholdPoint bisect_threshold(const VerdictOracle& oracle, double nu, double mu, double lo,
                                double hi, double tol = 0.05);

/// Fit of amplitude_star against nu: the exponent is the empirical gamma.
ScalingFit fit_threshold(const std::vector<ThresholdPoint>& points);

}  // namespace chanstab
