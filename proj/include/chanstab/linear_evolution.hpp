#pragma once

// Semigroups e^{-tA} of the per-mode operators, decay-rate fits, the
// Gearhart-Pruss comparison, and forced linear solves that accumulate the
// space-time norms of the linear estimates.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "chanstab/operators.hpp"

namespace chanstab {

struct DecayCurve {
  std::vector<double> times;
  std::vector<double> norms;
  double fitted_rate = 0.0;
};

/// exp(-t B) with B the weighted interior block, so its 2-norm is the L2 norm of
/// the semigroup on profiles vanishing at the walls.
CMatrix propagator(const ModeOperator& op, double t);

double propagator_norm(const ModeOperator& op, double t);

/// e^{-tA} x0 on the full grid; boundary entries of the result are zero.
CVector propagate(const ModeOperator& op, double t, const CVector& x0);

/// ||e^{-tA}|| on `samples` equispaced times in [0, horizon]; the rate is the
/// negated least-squares slope of log ||e^{-tA}|| over t >= horizon / 2.
DecayCurve decay_rate(const ModeOperator& op, double horizon, int samples);

/// Rate a for the e^{a t} weight of forced_linear_solve: half the fitted decay
/// rate, so the weighted semigroup stays bounded on the fitted window.
double weight_growth_rate(const DecayCurve& curve);

struct GearhartPrussReport {
  bool pass = true;
  double worst_margin = 0.0;  // min_t  e^{-t psi + pi/2} - ||e^{-tA}||
  double psi = 0.0;
  int violations = 0;
};

/// Throws PreconditionViolation unless accretivity_check(op) >= -1e-10.
GearhartPrussReport gearhart_pruss_check(const ModeOperator& op, std::vector<double> t_grid);

/// Right-hand side pieces at one instant. Empty vectors mean zero. The
/// vorticity equation reads f1..f4, the temperature equation g1..g3.
struct ForcingSample {
  CVector f1, f2, f3, f4;
  CVector g1, g2, g3;
};

struct ForcingDecomposition {
  std::function<ForcingSample(double)> at;  // empty function means no forcing

  static ForcingDecomposition none() { return {}; }
  static ForcingDecomposition constant(ForcingSample s) {
    return {[s = std::move(s)](double) { return s; }};
  }
};

/// Space-time norms of one forced solve. `lhs_terms` and `rhs_terms` hold the
/// squared, coefficient-weighted pieces of the estimate being tested:
///   vorticity:   w_Linf, nu_grad, w_L2L2, u_L2L2  vs  init, f12, f3, f4
///   temperature: theta_Linf, theta_L2L2, mu_grad  vs  init, g12, g3
/// `constant` is lhs / rhs (0 when both vanish).
struct NormReport {
  OperatorKind kind = OperatorKind::advection_diffusion;
  int k = 0;
  double coeff = 0.0;
  double growth_rate = 0.0;
  std::map<std::string, double> lhs_terms;
  std::map<std::string, double> rhs_terms;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  std::vector<double> times;
  std::vector<double> norms;  // ||x(t)||, unweighted by the growth factor
};

/// Crank-Nicolson on A with the forcing evaluated at step midpoints; time
/// integrals use the trapezoid rule on the step grid. With growth_rate = a > 0
/// every accumulated quantity carries the factor e^{a t}.
NormReport forced_linear_solve(const ModeOperator& op, const ForcingDecomposition& forcing,
                               const FieldMode& init, double dt, double horizon,
                               double growth_rate = 0.0);

}  // namespace chanstab
