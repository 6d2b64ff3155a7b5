#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "chanstab/errors.hpp"
#include "chanstab/operators.hpp"
#include "test_util.hpp"

using namespace chanstab;
using chanstab::test::from_function;
using chanstab::test::random_interior;

namespace {

constexpr double kPi = std::numbers::pi;

CVector ground_mode(const ChebyshevGrid& grid) {
  return from_function(grid, [](double y) { return std::sin(kPi * (y + 1.0) / 2.0); });
}

double interior_error(const CVector& a, const CVector& b, const ChebyshevGrid& grid) {
  const int m = grid.interior_size();
  return (a.segment(1, m) - b.segment(1, m)).cwiseAbs().maxCoeff();
}

TEST(AssembleH, ZeroInZeroOut) {
  const ChebyshevGrid grid = build_grid(16);
  const CVector out = assemble_H(1e-2, 1, grid).apply(CVector::Zero(grid.size()));
  EXPECT_EQ(out.cwiseAbs().maxCoeff(), 0.0);
}

TEST(AssembleH, EigenfunctionAction) {
  const ChebyshevGrid grid = build_grid(64);
  const CVector theta = ground_mode(grid);
  const CVector got = assemble_H(1.0, 1, grid).apply(theta);
  CVector expected(grid.size());
  for (int j = 0; j < grid.size(); ++j) {
    const double y = grid.nodes()(j);
    expected(j) = (kPi * kPi / 4.0 + 1.0) * theta(j) + Complex(0.0, 1.0 - y * y) * theta(j);
  }
  EXPECT_LT(interior_error(got, expected, grid), 1e-9);
}

TEST(AssembleH, InteriorRowsMatchDefinition) {
  const ChebyshevGrid grid = build_grid(24);
  const double mu = 3e-3;
  const int k = 2;
  const ModeOperator op = assemble_H(mu, k, grid);
  CMatrix expected = (mu * (k * k * RMatrix::Identity(grid.size(), grid.size()) - grid.d2())).cast<Complex>();
  for (int j = 0; j < grid.size(); ++j) {
    expected(j, j) += Complex(0.0, k * (1.0 - grid.nodes()(j) * grid.nodes()(j)));
  }
  const int m = grid.interior_size();
  EXPECT_LT((op.matrix().middleRows(1, m) - expected.middleRows(1, m)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(AssembleH, RejectsZeroWavenumberAndBadCoefficient) {
  const ChebyshevGrid grid = build_grid(16);
  EXPECT_THROW(assemble_H(1e-2, 0, grid), InvalidArgument);
  EXPECT_THROW(assemble_H(0.0, 1, grid), InvalidArgument);
  EXPECT_THROW(assemble_L(-1.0, 1, grid), InvalidArgument);
  EXPECT_THROW(assemble_L(1e-2, 0, grid), InvalidArgument);
}

TEST(AssembleL, EigenfunctionAction) {
  const ChebyshevGrid grid = build_grid(64);
  const CVector w = ground_mode(grid);
  const CVector got = assemble_L(1.0, 1, grid).apply(w);
  const double lambda = kPi * kPi / 4.0 + 1.0;
  CVector expected(grid.size());
  for (int j = 0; j < grid.size(); ++j) {
    const double y = grid.nodes()(j);
    expected(j) = lambda * w(j) + Complex(0.0, 1.0 - y * y) * w(j) - Complex(0.0, 2.0 / lambda) * w(j);
  }
  EXPECT_LT(interior_error(got, expected, grid), 1e-8);
}

TEST(AssembleL, Linearity) {
  const ChebyshevGrid grid = build_grid(32);
  const ModeOperator op = assemble_L(1e-3, 2, grid);
  std::mt19937_64 rng(1);
  const CVector a = random_interior(grid, rng);
  const CVector b = random_interior(grid, rng);
  const Complex ca(0.3, -1.2), cb(-2.0, 0.5);
  const CVector lhs = op.apply(ca * a + cb * b);
  const CVector rhs = ca * op.apply(a) + cb * op.apply(b);
  EXPECT_LT((lhs - rhs).norm() / rhs.norm(), 1e-12);
}

TEST(AssembleL, DifferenceFromAdvectionDiffusionIsNonlocalTerm) {
  const ChebyshevGrid grid = build_grid(32);
  const double nu = 1e-3;
  const int k = 3;
  const int m = grid.interior_size();
  const CMatrix diff = assemble_L(nu, k, grid).interior() - assemble_H(nu, k, grid).interior();
  const RMatrix hinv = HelmholtzSolver(grid, k).inverse().block(1, 1, m, m);
  const CMatrix expected = Complex(0.0, 2.0 * k) * hinv.cast<Complex>();
  EXPECT_LT((diff - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ModeOperator, ShiftedSolvesKeepWallsZero) {
  const ChebyshevGrid grid = build_grid(32);
  std::mt19937_64 rng(2);
  for (const ModeOperator& op : {assemble_H(1e-3, 1, grid), assemble_L(1e-3, 2, grid)}) {
    for (Complex shift : {Complex(0.0, 0.0), Complex(0.5, 0.0), Complex(1.0, -3.0)}) {
      CVector b = random_interior(grid, rng);
      b(0) = 1.0;  // nonzero wall data in the right side is ignored
      const CVector x = op.solve_shifted(shift, b);
      EXPECT_EQ(x(0), Complex(0.0));
      EXPECT_EQ(x(grid.degree()), Complex(0.0));
      const CVector r = op.apply(x) + shift * x - b;
      EXPECT_LT(r.segment(1, grid.interior_size()).norm(), 1e-9 * b.norm() * op.matrix().norm());
    }
  }
}

TEST(VelocityFromVorticity, ZeroInZeroOut) {
  const ChebyshevGrid grid = build_grid(16);
  const Velocity u = velocity_from_vorticity({1, CVector::Zero(grid.size())}, 1, grid);
  EXPECT_EQ(u.u1.values.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(u.u2.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(VelocityFromVorticity, PolynomialStreamFunction) {
  // phi = (1 - y^2)^2: phi'' - phi = (12 y^2 - 4) - (1 - y^2)^2.
  const ChebyshevGrid grid = build_grid(64);
  const CVector omega = from_function(grid, [](double y) {
    return (12.0 * y * y - 4.0) - std::pow(1.0 - y * y, 2);
  });
  const Velocity u = velocity_from_vorticity({1, omega}, 1, grid);
  const CVector u1 = from_function(grid, [](double y) { return -4.0 * y * (1.0 - y * y); });
  const CVector phi = from_function(grid, [](double y) { return std::pow(1.0 - y * y, 2); });
  EXPECT_LT((u.u1.values - u1).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((u.u2.values - Complex(0.0, -1.0) * phi).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(VelocityFromVorticity, DivergenceFreeWithZeroNormalVelocityAtWalls) {
  const ChebyshevGrid grid = build_grid(48);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 1 + trial % 5;
    const CVector omega = random_interior(grid, rng);
    const Velocity u = velocity_from_vorticity({k, omega}, k, grid);
    const CVector div = Complex(0.0, k) * u.u1.values + grid.d1() * u.u2.values;
    EXPECT_LE(div.cwiseAbs().maxCoeff(), 1e-9 * l2_norm(omega, grid));
    EXPECT_EQ(u.u2.values(0), Complex(0.0));
    EXPECT_EQ(u.u2.values(grid.degree()), Complex(0.0));
  }
}

TEST(VelocityFromVorticity, StreamFunctionCurvatureVanishesAtWalls) {
  // phi(+-1) = 0 and w(+-1) = 0 force phi''(+-1) = 0 without imposing it.
  const ChebyshevGrid grid = build_grid(48);
  const int k = 2;
  const CVector omega = from_function(grid, [](double y) { return (1.0 - y * y) * std::exp(y); });
  const Velocity u = velocity_from_vorticity({k, omega}, k, grid);
  const CVector phi = Complex(0.0, 1.0 / k) * u.u2.values;
  const CVector curvature = grid.d2() * phi;
  EXPECT_LT(std::abs(curvature(0)), 1e-8);
  EXPECT_LT(std::abs(curvature(grid.degree())), 1e-8);
}

TEST(Accretivity, DiffusionRayleighQuotient) {
  const ChebyshevGrid grid = build_grid(64);
  EXPECT_NEAR(accretivity_check(assemble_diffusion(1.0, 1, grid)), kPi * kPi / 4.0 + 1.0,
              0.01 * (kPi * kPi / 4.0 + 1.0));
}

TEST(Accretivity, ShearPartIsSkew) {
  const ChebyshevGrid grid = build_grid(64);
  EXPECT_NEAR(accretivity_check(assemble_shear(1, grid)), 0.0, 1e-12);
  EXPECT_NEAR(accretivity_check(assemble_shear(4, grid)), 0.0, 1e-12);
}

TEST(Accretivity, AdvectionDiffusionIsAccretive) {
  const ChebyshevGrid grid = build_grid(64);
  EXPECT_GE(accretivity_check(assemble_H(1e-3, 1, grid)), -1e-10);
  EXPECT_GE(accretivity_check(assemble_H(1e-4, 2, grid)), -1e-10);
  // Same value on a finer grid (the check is a resolved Rayleigh quotient).
  const double coarse = accretivity_check(assemble_H(1e-3, 1, grid));
  const double fine = accretivity_check(assemble_H(1e-3, 1, build_grid(128)));
  EXPECT_NEAR(coarse, fine, 1e-6 * fine);
}

TEST(Accretivity, HermitianPartOfAdvectionDiffusionIsDiffusion) {
  const ChebyshevGrid grid = build_grid(48);
  const CMatrix h = assemble_H(2e-3, 3, grid).weighted();
  const CMatrix d = assemble_diffusion(2e-3, 3, grid).weighted();
  const CMatrix herm_h = 0.5 * (h + h.adjoint());
  const CMatrix herm_d = 0.5 * (d + d.adjoint());
  EXPECT_LT((herm_h - herm_d).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(OperatorKind, Names) {
  EXPECT_STREQ(to_string(OperatorKind::orr_sommerfeld), "orr_sommerfeld");
  EXPECT_STREQ(to_string(OperatorKind::advection_diffusion), "advection_diffusion");
}

}  // namespace
