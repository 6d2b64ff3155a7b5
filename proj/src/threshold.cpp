#include "chanstab/threshold.hpp"

#include <cmath>

#include "chanstab/errors.hpp"

namespace chanstab {

const char* to_string(Verdict v) { return v == Verdict::stable ? "stable" : "unstable"; }

VerdictDetail classify_run(const SimConfig& config, const PerturbationState& initial) {
  SimConfig c = config;
  c.horizon = config.resolved_horizon();
  VerdictDetail d;
  for (int attempt = 0; attempt < 3; ++attempt) {
    const RunResult r = run(c, initial);
    d.horizon = c.horizon;
    d.diverged = r.diverged;
    d.ratio = r.growth_ratio();
    if (r.diverged || d.ratio >= 10.0) {
      d.verdict = Verdict::unstable;
      return d;
    }
    if (d.ratio <= 4.0) {
      d.verdict = Verdict::stable;
      return d;
    }
    c.horizon *= 2.0;
  }
  d.verdict = Verdict::unstable;
  return d;
}

VerdictOracle simulation_oracle(const SimConfig& base, InitialShape shape) {
  return [base, shape](double nu, double mu, double amplitude) {
    SimConfig c = base;
    c.nu = nu;
    c.mu = mu;
    const double temperature = c.c1 * std::pow(std::min(nu, mu), 31.0 / 24.0);
    const PerturbationState init = make_initial_data(c, shape, amplitude, temperature);
    return classify_run(c, init).verdict;
  };
}

ThresholdPoint bisect_threshold(const VerdictOracle& oracle, double nu, double mu, double lo,
                                double hi, double tol) {
  if (!(lo > 0.0) || !(hi > 0.0) || !(tol > 0.0)) {
    throw InvalidArgument("bisect_threshold: bracket and tolerance must be positive");
  }
  ThresholdPoint p;
  p.nu = nu;
  p.mu = mu;
  const Verdict vlo = oracle(nu, mu, lo);
  const Verdict vhi = oracle(nu, mu, hi);
  p.evaluations = 2;
  if (!(hi > lo) || vlo != Verdict::stable || vhi != Verdict::unstable) {
    throw BracketError(vlo, vhi,
                       "bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
                           "] has verdicts " + to_string(vlo) + " / " + to_string(vhi));
  }
  while (hi / lo - 1.0 > tol) {
    const double mid = std::sqrt(lo * hi);
    if (oracle(nu, mu, mid) == Verdict::stable) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++p.evaluations;
  }
  p.lo = lo;
  p.hi = hi;
  p.amplitude_star = std::sqrt(lo * hi);
  p.verdict_margin = hi / lo - 1.0;
  return p;
}

ScalingFit fit_threshold(const std::vector<ThresholdPoint>& points) {
  std::vector<double> xs, ys;
  for (const auto& p : points) {
    xs.push_back(p.nu);
    ys.push_back(p.amplitude_star);
  }
  return fit_scaling(xs, ys);
}

}  // namespace chanstab
