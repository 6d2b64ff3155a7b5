#include "chanstab/linear_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "chanstab/errors.hpp"
#include "chanstab/resolvent.hpp"

namespace chanstab {

namespace {

CMatrix step_matrix(const ModeOperator& op, double dt) {
  const CMatrix scaled = -dt * op.weighted();
  return scaled.exp();
}

void require_time(double t, const char* where) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw InvalidArgument(std::string(where) + ": time must be finite and >= 0");
  }
}

double squared_norm(const CVector& v, const ChebyshevGrid& grid) {
  if (v.size() == 0) return 0.0;
  const double n = l2_norm(v, grid);
  return n * n;
}

double squared_hk1(const CVector& v, int k, const ChebyshevGrid& grid) {
  if (v.size() == 0) return 0.0;
  const double n = hk1_norm(v, k, grid);
  return n * n;
}

void check_forcing_vector(const CVector& v, const ChebyshevGrid& grid, const char* name) {
  if (v.size() != 0) require_on_grid(v, grid, name);
}

bool is_vorticity(OperatorKind kind) { return kind == OperatorKind::orr_sommerfeld; }

CVector assemble_rhs(const ForcingSample& s, OperatorKind kind, int k, const ChebyshevGrid& grid) {
  const Complex ik(0.0, k);
  CVector rhs = CVector::Zero(grid.size());
  const auto add = [&](const CVector& v, Complex c) {
    if (v.size() != 0) rhs += c * v;
  };
  if (is_vorticity(kind)) {
    check_forcing_vector(s.f1, grid, "f1");
    check_forcing_vector(s.f2, grid, "f2");
    check_forcing_vector(s.f3, grid, "f3");
    check_forcing_vector(s.f4, grid, "f4");
    if (s.f3.size() != 0) {
      const double scale = std::max(1.0, s.f3.cwiseAbs().maxCoeff());
      if (std::abs(s.f3(0)) > 1e-12 * scale || std::abs(s.f3(grid.degree())) > 1e-12 * scale) {
        throw InvalidArgument("forced_linear_solve: f3 must vanish at the walls");
      }
    }
    add(s.f1, -ik);
    if (s.f2.size() != 0) rhs -= grid.d1() * s.f2;
    add(s.f3, -1.0);
    add(s.f4, -1.0);
  } else {
    check_forcing_vector(s.g1, grid, "g1");
    check_forcing_vector(s.g2, grid, "g2");
    check_forcing_vector(s.g3, grid, "g3");
    add(s.g1, -ik);
    if (s.g2.size() != 0) rhs -= grid.d1() * s.g2;
    add(s.g3, -1.0);
  }
  return rhs;
}

// Instantaneous squared quantities; time integrals and maxima are taken by the caller.
struct Snapshot {
  double state = 0.0;
  double grad = 0.0;
  double velocity = 0.0;
  double f12 = 0.0;
  double f3 = 0.0;
  double f4 = 0.0;
};

Snapshot snapshot(const CVector& x, const ForcingSample& s, OperatorKind kind, int k,
                  const ChebyshevGrid& grid) {
  Snapshot out;
  out.state = squared_norm(x, grid);
  out.grad = squared_hk1(x, k, grid);
  if (is_vorticity(kind)) {
    const Velocity u = velocity_from_vorticity({k, x}, k, grid);
    out.velocity = squared_norm(u.u1.values, grid) + squared_norm(u.u2.values, grid);
    out.f12 = squared_norm(s.f1, grid) + squared_norm(s.f2, grid);
    out.f3 = squared_hk1(s.f3, k, grid);
    out.f4 = squared_norm(s.f4, grid);
  } else {
    out.f12 = squared_norm(s.g1, grid) + squared_norm(s.g2, grid);
    out.f4 = squared_norm(s.g3, grid);
  }
  return out;
}

}  // namespace

CMatrix propagator(const ModeOperator& op, double t) {
  require_time(t, "propagator");
  return step_matrix(op, t);
}

double propagator_norm(const ModeOperator& op, double t) {
  return largest_singular_value(propagator(op, t));
}

CVector propagate(const ModeOperator& op, double t, const CVector& x0) {
  const ChebyshevGrid& grid = op.grid();
  require_on_grid(x0, grid, "propagate");
  const int m = grid.interior_size();
  const RVector s = interior_weights(grid).array().sqrt();
  const CVector y = propagator(op, t) * (s.cast<Complex>().cwiseProduct(x0.segment(1, m)));
  CVector out = CVector::Zero(grid.size());
  out.segment(1, m) = y.cwiseQuotient(s.cast<Complex>());
  return out;
}

DecayCurve decay_rate(const ModeOperator& op, double horizon, int samples) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw InvalidArgument("decay_rate: horizon must be positive");
  }
  if (samples < 2) {
    throw InvalidArgument("decay_rate: need at least 2 samples");
  }
  const double dt = horizon / (samples - 1);
  const CMatrix step = step_matrix(op, dt);
  DecayCurve curve;
  CMatrix p = CMatrix::Identity(step.rows(), step.cols());
  for (int j = 0; j < samples; ++j) {
    curve.times.push_back(j * dt);
    curve.norms.push_back(largest_singular_value(p));
    p = step * p;
  }

  double st = 0, sl = 0, stt = 0, stl = 0;
  int count = 0;
  for (int j = 0; j < samples; ++j) {
    const double t = curve.times[j];
    const double v = curve.norms[j];
    if (t < 0.5 * horizon || !(v > 0.0)) continue;
    const double l = std::log(v);
    st += t;
    sl += l;
    stt += t * t;
    stl += t * l;
    ++count;
  }
  if (count < 4) {
    throw InvalidArgument("decay_rate: fewer than 4 usable tail samples");
  }
  const double slope = (count * stl - st * sl) / (count * stt - st * st);
  curve.fitted_rate = -slope;
  return curve;
}

double weight_growth_rate(const DecayCurve& curve) { return std::max(0.0, 0.5 * curve.fitted_rate); }

GearhartPrussReport gearhart_pruss_check(const ModeOperator& op, std::vector<double> t_grid) {
  if (accretivity_check(op) < -1e-10) {
    throw PreconditionViolation("gearhart_pruss_check: operator is not accretive");
  }
  for (double t : t_grid) require_time(t, "gearhart_pruss_check");
  std::sort(t_grid.begin(), t_grid.end());

  GearhartPrussReport report;
  report.psi = psi(op, default_lambda_range(op.k()));
  report.worst_margin = std::numeric_limits<double>::infinity();
  const Eigen::Index m = op.weighted().rows();
  CMatrix p = CMatrix::Identity(m, m);
  double previous = 0.0;
  for (double t : t_grid) {
    if (t > previous) p = step_matrix(op, t - previous) * p;
    previous = t;
    const double bound = std::exp(-t * report.psi + std::numbers::pi / 2);
    const double margin = bound - largest_singular_value(p);
    report.worst_margin = std::min(report.worst_margin, margin);
    if (margin < -1e-12 * bound) {
      report.pass = false;
      ++report.violations;
    }
  }
  if (t_grid.empty()) report.worst_margin = 0.0;
  return report;
}

NormReport forced_linear_solve(const ModeOperator& op, const ForcingDecomposition& forcing,
                               const FieldMode& init, double dt, double horizon,
                               double growth_rate) {
  const ChebyshevGrid& grid = op.grid();
  const int k = op.k();
  const double coeff = op.coeff();
  if (op.kind() == OperatorKind::shear || k == 0) {
    throw InvalidArgument("forced_linear_solve: needs a dissipative operator with k != 0");
  }
  if (!(dt > 0.0) || !(horizon >= dt) || !std::isfinite(horizon)) {
    throw InvalidArgument("forced_linear_solve: need 0 < dt <= horizon");
  }
  if (!(growth_rate >= 0.0) || !std::isfinite(growth_rate)) {
    throw InvalidArgument("forced_linear_solve: growth rate must be finite and >= 0");
  }
  require_on_grid(init.values, grid, "forced_linear_solve");

  const int steps = static_cast<int>(std::ceil(horizon / dt - 1e-9));
  const double h = horizon / steps;
  const int m = grid.interior_size();
  const CMatrix a = op.interior();
  const CMatrix identity = CMatrix::Identity(m, m);
  const Eigen::PartialPivLU<CMatrix> implicit(identity + 0.5 * h * a);
  const CMatrix explicit_part = identity - 0.5 * h * a;
  const auto sample = [&](double t) { return forcing.at ? forcing.at(t) : ForcingSample{}; };

  CVector x = CVector::Zero(grid.size());
  x.segment(1, m) = init.values.segment(1, m);

  NormReport report;
  report.kind = op.kind();
  report.k = k;
  report.coeff = coeff;
  report.growth_rate = growth_rate;

  Snapshot sup;
  Snapshot integral;
  auto accumulate = [&](double t, const ForcingSample& s, double weight) {
    const Snapshot q = snapshot(x, s, op.kind(), k, grid);
    const double g = std::exp(2.0 * growth_rate * t);
    sup.state = std::max(sup.state, g * q.state);
    integral.state += weight * g * q.state;
    integral.grad += weight * g * q.grad;
    integral.velocity += weight * g * q.velocity;
    integral.f12 += weight * g * q.f12;
    integral.f3 += weight * g * q.f3;
    integral.f4 += weight * g * q.f4;
    report.times.push_back(t);
    report.norms.push_back(std::sqrt(q.state));
  };

  accumulate(0.0, sample(0.0), 0.5 * h);
  for (int n = 0; n < steps; ++n) {
    const double t = n * h;
    const CVector rhs = assemble_rhs(sample(t + 0.5 * h), op.kind(), k, grid);
    x.segment(1, m) = implicit.solve(explicit_part * x.segment(1, m) + h * rhs.segment(1, m));
    if (!x.allFinite()) {
      throw Diverged(t + h, "forced_linear_solve: non-finite state");
    }
    accumulate(t + h, sample(t + h), n + 1 == steps ? 0.5 * h : h);
  }

  const double ak = std::abs(static_cast<double>(k));
  const double min_weight = std::min(1.0 / std::sqrt(coeff * ak), 1.0 / (coeff * ak * ak));
  if (is_vorticity(op.kind())) {
    CVector w0 = CVector::Zero(grid.size());
    w0.segment(1, m) = init.values.segment(1, m);
    const CVector lap = grid.d2() * w0 - static_cast<double>(k * k) * w0;
    report.lhs_terms = {{"w_Linf", sup.state},
                        {"nu_grad", coeff * integral.grad},
                        {"w_L2L2", std::sqrt(coeff * ak) * integral.state},
                        {"u_L2L2", ak * integral.velocity}};
    report.rhs_terms = {{"init", squared_norm(lap, grid)},
                        {"f12", integral.f12 / coeff},
                        {"f3", integral.f3 / ak},
                        {"f4", min_weight * integral.f4}};
  } else {
    report.lhs_terms = {{"theta_Linf", sup.state},
                        {"theta_L2L2", std::sqrt(coeff * ak) * integral.state},
                        {"mu_grad", coeff * integral.grad}};
    report.rhs_terms = {{"init", squared_norm(init.values, grid)},
                        {"g12", integral.f12 / coeff},
                        {"g3", min_weight * integral.f4}};
  }
  for (const auto& [name, v] : report.lhs_terms) report.lhs += v;
  for (const auto& [name, v] : report.rhs_terms) report.rhs += v;
  if (!std::isfinite(report.lhs) || !std::isfinite(report.rhs)) {
    throw Diverged(horizon, "forced_linear_solve: non-finite accumulator");
  }
  if (report.rhs > 0.0) {
    report.constant = report.lhs / report.rhs;
  } else if (report.lhs > 0.0) {
    report.constant = std::numeric_limits<double>::infinity();
  }
  return report;
}

}  // namespace chanstab
