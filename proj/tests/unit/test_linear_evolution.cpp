#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "chanstab/errors.hpp"
#include "chanstab/linear_evolution.hpp"
#include "chanstab/resolvent.hpp"
#include "test_util.hpp"

using namespace chanstab;
using chanstab::test::from_function;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGround = kPi * kPi / 4.0 + 1.0;

CVector ground_mode(const ChebyshevGrid& grid) {
  return from_function(grid, [](double y) { return std::sin(kPi * (y + 1.0) / 2.0); });
}

TEST(PropagatorNorm, IdentityAtZero) {
  const ModeOperator op = assemble_L(1e-3, 1, build_grid(32));
  EXPECT_NEAR(propagator_norm(op, 0.0), 1.0, 1e-12);
  EXPECT_THROW(propagator_norm(op, -1.0), InvalidArgument);
}

TEST(PropagatorNorm, SelfAdjointDecay) {
  const ModeOperator op = assemble_diffusion(1.0, 1, build_grid(64));
  for (double t : {0.1, 0.5, 1.0}) {
    const double expected = std::exp(-t * kGround);
    EXPECT_NEAR(propagator_norm(op, t), expected, 0.01 * expected);
  }
}

TEST(PropagatorNorm, ContractionIsMonotone) {
  const ModeOperator op = assemble_H(1e-3, 1, build_grid(48));
  double previous = 1.0;
  for (int i = 1; i <= 50; ++i) {
    const double v = propagator_norm(op, 2.0 * i);
    EXPECT_LE(v, previous + 1e-12);
    previous = v;
  }
}

TEST(Propagate, MatchesEigenDecayForGroundMode) {
  const ChebyshevGrid grid = build_grid(64);
  const ModeOperator op = assemble_diffusion(1.0, 2, grid);
  const CVector x0 = ground_mode(grid);
  const CVector x = propagate(op, 0.3, x0);
  EXPECT_LT((x - std::exp(-0.3 * (kGround + 3.0)) * x0).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_EQ(x(0), Complex(0.0));
}

TEST(GearhartPruss, AdvectionDiffusionPasses) {
  const double mu = 1e-3;
  const ModeOperator op = assemble_H(mu, 1, build_grid(64));
  std::vector<double> ts;
  for (int i = 0; i < 50; ++i) ts.push_back(3.0 / std::sqrt(mu) * i / 49.0);
  const GearhartPrussReport r = gearhart_pruss_check(op, ts);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.violations, 0);
  EXPECT_GT(r.psi, 0.0);
}

TEST(GearhartPruss, SelfAdjointSlackAtSmallTime) {
  const ModeOperator op = assemble_diffusion(1.0, 1, build_grid(32));
  const GearhartPrussReport r = gearhart_pruss_check(op, {0.0, 1e-3, 1e-2});
  EXPECT_TRUE(r.pass);
  // exp(-t psi + pi/2) - exp(-t psi) at t -> 0 is e^{pi/2} - 1.
  EXPECT_GE(r.worst_margin, (std::exp(kPi / 2.0) - 1.0) * std::exp(-1e-2 * kGround) - 1e-9);
}

TEST(GearhartPruss, TrivialGrid) {
  const ModeOperator op = assemble_H(1e-2, 1, build_grid(16));
  const GearhartPrussReport r = gearhart_pruss_check(op, {0.0});
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.worst_margin, std::exp(kPi / 2.0) - 1.0, 1e-12);
}

TEST(GearhartPruss, RejectsNonAccretiveOperator) {
  const ChebyshevGrid grid = build_grid(16);
  const ModeOperator base = assemble_diffusion(1.0, 1, grid);
  const ModeOperator flipped(OperatorKind::diffusion, 1, 1.0, grid, -base.matrix());
  EXPECT_THROW(gearhart_pruss_check(flipped, {0.0, 1.0}), PreconditionViolation);
}

TEST(DecayRate, SelfAdjointRate) {
  const ModeOperator op = assemble_diffusion(1.0, 1, build_grid(64));
  const DecayCurve c = decay_rate(op, 5.0, 40);
  EXPECT_NEAR(c.fitted_rate, kGround, 0.02 * kGround);
  EXPECT_NEAR(c.norms.front(), 1.0, 1e-10);
  for (std::size_t i = 1; i < c.times.size(); ++i) EXPECT_GT(c.times[i], c.times[i - 1]);
}

TEST(DecayRate, OrrSommerfeldRateReported) {
  const double nu = 1e-4;
  const DecayCurve c = decay_rate(assemble_L(nu, 1, build_grid(64)), 10.0 / std::sqrt(nu), 60);
  const double constant = c.fitted_rate / std::sqrt(nu);
  EXPECT_GT(constant, 0.0);
  RecordProperty("rate_over_sqrt_nu", std::to_string(constant));
}

TEST(DecayRate, AdvectionDiffusionAboveGearhartPrussLowerBound) {
  for (double mu : {1e-3, 1e-4}) {
    const ModeOperator op = assemble_H(mu, 1, build_grid(64));
    const double horizon = 10.0 / std::sqrt(mu);
    const DecayCurve c = decay_rate(op, horizon, 60);
    const double p = psi(op, default_lambda_range(1));
    EXPECT_GE(c.fitted_rate, p - kPi / (2.0 * horizon));
  }
}

TEST(DecayRate, AdvectionDiffusionRatesScaleAsSquareRoot) {
  const std::vector<double> mus = {1e-3, 1e-4, 1e-5, 1e-6};
  std::vector<double> rates;
  for (double mu : mus) {
    rates.push_back(decay_rate(assemble_H(mu, 1, build_grid(64)), 10.0 / std::sqrt(mu), 60).fitted_rate);
  }
  EXPECT_NEAR(fit_scaling(mus, rates).exponent, 0.5, 0.15);
}

TEST(DecayRate, RejectsDegenerateWindow) {
  const ModeOperator op = assemble_H(1e-2, 1, build_grid(16));
  EXPECT_THROW(decay_rate(op, 0.0, 10), InvalidArgument);
  EXPECT_THROW(decay_rate(op, 1.0, 5), InvalidArgument);
}

TEST(ForcedLinearSolve, ZeroEverythingGivesZero) {
  const ChebyshevGrid grid = build_grid(32);
  const ModeOperator op = assemble_L(1e-2, 1, grid);
  const NormReport r =
      forced_linear_solve(op, ForcingDecomposition::none(), {1, CVector::Zero(grid.size())}, 0.1, 5.0);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
  EXPECT_EQ(r.constant, 0.0);
  for (const auto& [name, v] : r.lhs_terms) EXPECT_EQ(v, 0.0) << name;
}

TEST(ForcedLinearSolve, FreeDecayOfEigenfunction) {
  const ChebyshevGrid grid = build_grid(64);
  const ModeOperator op = assemble_diffusion(1.0, 1, grid);
  const NormReport r =
      forced_linear_solve(op, ForcingDecomposition::none(), {1, ground_mode(grid)}, 1e-3, 1.0);
  for (std::size_t i = 0; i < r.times.size(); i += 100) {
    EXPECT_NEAR(r.norms[i], std::exp(-r.times[i] * kGround), 1e-5);
  }
  // For the temperature-type report the sup term is ||theta||_{Linf L2}^2 = 1.
  const NormReport h =
      forced_linear_solve(assemble_H(1.0, 1, grid), ForcingDecomposition::none(), {1, ground_mode(grid)}, 1e-3, 1.0);
  EXPECT_NEAR(h.lhs_terms.at("theta_Linf"), 1.0, 1e-3);
}

TEST(ForcedLinearSolve, ContractionStepByStep) {
  const ChebyshevGrid grid = build_grid(48);
  const ModeOperator op = assemble_H(1e-3, 2, grid);
  const NormReport r = forced_linear_solve(op, ForcingDecomposition::none(), {2, ground_mode(grid)}, 0.05, 20.0);
  for (std::size_t i = 1; i < r.norms.size(); ++i) EXPECT_LE(r.norms[i], r.norms[i - 1] + 1e-12);
}

TEST(ForcedLinearSolve, WeightedNormBoundedAtHalfTheDecayRate) {
  const ChebyshevGrid grid = build_grid(32);
  const double nu = 1e-2;
  const ModeOperator op = assemble_L(nu, 1, grid);
  const double horizon = 10.0 / std::sqrt(nu);
  const double a = weight_growth_rate(decay_rate(op, horizon, 60));
  EXPECT_GT(a, 0.0);
  const NormReport r = forced_linear_solve(op, ForcingDecomposition::none(), {1, ground_mode(grid)}, 0.05,
                                           horizon, a);
  // The weighted sup norm stays within a fixed multiple of the initial norm.
  EXPECT_LE(r.lhs_terms.at("w_Linf"), 25.0 * r.norms.front() * r.norms.front());
}

TEST(ForcedLinearSolve, SecondOrderAgainstMatrixExponential) {
  const ChebyshevGrid grid = build_grid(32);
  const ModeOperator op = assemble_L(1e-2, 1, grid);
  const FieldMode init{1, ground_mode(grid)};
  const double horizon = 4.0;
  const double exact = l2_norm(propagate(op, horizon, init.values), grid);
  const auto error = [&](double dt) {
    const NormReport r = forced_linear_solve(op, ForcingDecomposition::none(), init, dt, horizon);
    return std::abs(r.norms.back() - exact);
  };
  const double ratio = error(0.1) / error(0.05);
  EXPECT_GE(ratio, 3.0);
  EXPECT_LE(ratio, 5.0);
}

TEST(ForcedLinearSolve, SteadyResponseToConstantForcing) {
  const ChebyshevGrid grid = build_grid(48);
  const int k = 1;
  const ModeOperator op = assemble_H(0.5, k, grid);
  ForcingSample s;
  s.g1 = ground_mode(grid);
  const CVector steady = op.solve_shifted(0.0, Complex(0.0, -k) * s.g1);
  const NormReport r = forced_linear_solve(op, ForcingDecomposition::constant(s),
                                           {k, CVector::Zero(grid.size())}, 0.01, 20.0);
  EXPECT_NEAR(r.norms.back(), l2_norm(steady, grid), 0.02 * l2_norm(steady, grid));
}

TEST(ForcedLinearSolve, WeightedVariantStaysComparable) {
  const double nu = 1e-2;
  const ChebyshevGrid grid = build_grid(48);
  const ModeOperator op = assemble_L(nu, 1, grid);
  const double rate = decay_rate(op, 10.0 / std::sqrt(nu), 60).fitted_rate;
  ForcingSample s;
  s.f1 = ground_mode(grid);
  const auto forcing = ForcingDecomposition::constant(s);
  const FieldMode init{1, ground_mode(grid)};
  const NormReport plain = forced_linear_solve(op, forcing, init, 0.05, 50.0);
  const NormReport weighted = forced_linear_solve(op, forcing, init, 0.05, 50.0, 0.5 * rate);
  ASSERT_TRUE(std::isfinite(weighted.constant));
  EXPECT_GT(weighted.constant, 0.0);
  EXPECT_LE(weighted.constant, 10.0 * plain.constant);
  EXPECT_GE(weighted.constant, 0.1 * plain.constant);
}

TEST(ForcedLinearSolve, RejectsWallValuedF3AndBadSteps) {
  const ChebyshevGrid grid = build_grid(16);
  const ModeOperator op = assemble_L(1e-2, 1, grid);
  ForcingSample s;
  s.f3 = CVector::Ones(grid.size());
  const FieldMode init{1, CVector::Zero(grid.size())};
  EXPECT_THROW(forced_linear_solve(op, ForcingDecomposition::constant(s), init, 0.1, 1.0), InvalidArgument);
  EXPECT_THROW(forced_linear_solve(op, ForcingDecomposition::none(), init, 0.0, 1.0), InvalidArgument);
  EXPECT_THROW(forced_linear_solve(op, ForcingDecomposition::none(), init, 2.0, 1.0), InvalidArgument);
}

TEST(ForcedLinearSolve, ReportsAllNamedTerms) {
  const ChebyshevGrid grid = build_grid(24);
  ForcingSample s;
  s.f1 = ground_mode(grid);
  s.f4 = ground_mode(grid);
  const NormReport r = forced_linear_solve(assemble_L(1e-2, 1, grid), ForcingDecomposition::constant(s),
                                           {1, ground_mode(grid)}, 0.1, 5.0);
  for (const char* name : {"w_Linf", "nu_grad", "w_L2L2", "u_L2L2"}) EXPECT_TRUE(r.lhs_terms.count(name)) << name;
  for (const char* name : {"init", "f12", "f3", "f4"}) EXPECT_TRUE(r.rhs_terms.count(name)) << name;
  EXPECT_TRUE(std::isfinite(r.constant));
  EXPECT_GT(r.constant, 0.0);
}

}  // namespace
