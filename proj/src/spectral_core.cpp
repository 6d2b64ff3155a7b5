#include "chanstab/spectral_core.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "chanstab/errors.hpp"

namespace chanstab {

namespace {

RVector lobatto_nodes(int n) {
  RVector y(n + 1);
  // sin form keeps the nodes exactly antisymmetric and y_{n/2} = 0
  for (int j = 0; j <= n; ++j) {
    y(j) = std::sin(std::numbers::pi * (n - 2.0 * j) / (2.0 * n));
  }
  return y;
}

// Clenshaw-Curtis weights on the Lobatto nodes, n even.
RVector clenshaw_curtis_weights(int n) {
  RVector w = RVector::Zero(n + 1);
  const double nn = static_cast<double>(n) * n;
  w(0) = w(n) = 1.0 / (nn - 1.0);
  for (int j = 1; j < n; ++j) {
    const double theta = std::numbers::pi * j / n;
    double v = 1.0;
    for (int m = 1; m < n / 2; ++m) {
      v -= 2.0 * std::cos(2.0 * m * theta) / (4.0 * m * m - 1.0);
    }
    v -= std::cos(n * theta) / (nn - 1.0);
    w(j) = 2.0 * v / n;
  }
  return w;
}

// Chebyshev differentiation matrix with trigonometric node differences and the
// negative-sum diagonal, which keeps row sums at rounding level.
RMatrix chebyshev_d1(int n) {
  RMatrix d = RMatrix::Zero(n + 1, n + 1);
  auto c = [n](int i) { return (i == 0 || i == n) ? 2.0 : 1.0; };
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      const double diff = -2.0 * std::sin(std::numbers::pi * (i + j) / (2.0 * n)) *
                          std::sin(std::numbers::pi * (i - j) / (2.0 * n));
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      d(i, j) = c(i) / c(j) * sign / diff;
    }
  }
  for (int i = 0; i <= n; ++i) {
    d(i, i) = -d.row(i).sum();
  }
  return d;
}

}  // namespace

ChebyshevGrid::ChebyshevGrid(int n) {
  if (n < 8 || n % 2 != 0) {
    throw InvalidArgument("grid degree must be even and >= 8, got " + std::to_string(n));
  }
  auto data = std::make_shared<Data>();
  data->n = n;
  data->nodes = lobatto_nodes(n);
  data->weights = clenshaw_curtis_weights(n);
  data->d1 = chebyshev_d1(n);
  data->d2 = data->d1 * data->d1;
  data_ = std::move(data);
}

ChebyshevGrid build_grid(int n) { return ChebyshevGrid(n); }

DiffOp diff_matrix(const ChebyshevGrid& grid, int order) {
  switch (order) {
    case 1:
      return {1, grid.d1()};
    case 2:
      return {2, grid.d2()};
    default:
      throw InvalidArgument("differentiation order must be 1 or 2, got " + std::to_string(order));
  }
}

void require_on_grid(const CVector& v, const ChebyshevGrid& grid, const char* what) {
  if (v.size() != grid.size()) {
    throw InvalidArgument(std::string(what) + ": profile has " + std::to_string(v.size()) +
                          " values, grid has " + std::to_string(grid.size()) + " nodes");
  }
}

Complex inner_product(const CVector& f, const CVector& g, const ChebyshevGrid& grid) {
  require_on_grid(f, grid, "inner_product");
  require_on_grid(g, grid, "inner_product");
  const RVector& w = grid.weights();
  Complex acc = 0.0;
  for (int j = 0; j < grid.size(); ++j) {
    acc += w(j) * f(j) * std::conj(g(j));
  }
  return acc;
}

Complex inner_product(const FieldMode& f, const FieldMode& g, const ChebyshevGrid& grid) {
  return inner_product(f.values, g.values, grid);
}

double l2_norm(const CVector& f, const ChebyshevGrid& grid) {
  require_on_grid(f, grid, "l2_norm");
  return std::sqrt((grid.weights().array() * f.array().abs2()).sum());
}

HelmholtzSolver::HelmholtzSolver(const ChebyshevGrid& grid, int k) : k_(k) {
  const int n = grid.degree();
  RMatrix m = grid.d2();
  m.diagonal().array() -= static_cast<double>(k) * k;
  m.row(0).setZero();
  m.row(n).setZero();
  m(0, 0) = 1.0;
  m(n, n) = 1.0;
  Eigen::FullPivLU<RMatrix> lu(m);
  if (!lu.isInvertible()) {
    throw InternalError("Helmholtz matrix singular for k = " + std::to_string(k));
  }
  inverse_ = lu.inverse();
}

CVector HelmholtzSolver::solve(const CVector& f) const {
  if (f.size() != inverse_.rows()) {
    throw InvalidArgument("HelmholtzSolver::solve: size mismatch");
  }
  const Eigen::Index n = f.size() - 1;
  CVector rhs = f;
  rhs(0) = 0.0;
  rhs(n) = 0.0;
  CVector u = inverse_ * rhs;
  u(0) = 0.0;
  u(n) = 0.0;
  return u;
}

FieldMode solve_helmholtz(const ChebyshevGrid& grid, int k, const FieldMode& f) {
  require_on_grid(f.values, grid, "solve_helmholtz");
  if (!f.values.allFinite()) {
    throw InvalidArgument("solve_helmholtz: non-finite right side");
  }
  return {f.k, HelmholtzSolver(grid, k).solve(f.values)};
}

double hk1_norm(const CVector& g, int k, const ChebyshevGrid& grid) {
  require_on_grid(g, grid, "hk1_norm");
  const CVector dg = grid.d1() * g;
  const double a = l2_norm(dg, grid);
  const double b = l2_norm(g, grid);
  return std::sqrt(a * a + static_cast<double>(k) * k * b * b);
}

double hk1_norm(const FieldMode& g, int k, const ChebyshevGrid& grid) {
  return hk1_norm(g.values, k, grid);
}

double hk_dual_norm(const CVector& F, int k, const ChebyshevGrid& grid) {
  require_on_grid(F, grid, "hk_dual_norm");
  if (k == 0) {
    throw InvalidArgument("hk_dual_norm is defined for k != 0");
  }
  // (k^2 - d_yy) u = F  <=>  (d_yy - k^2) u = -F
  const CVector u = HelmholtzSolver(grid, k).solve(-F);
  const double q = inner_product(F, u, grid).real();
  return std::sqrt(std::max(q, 0.0));
}

double hk_dual_norm(const FieldMode& F, int k, const ChebyshevGrid& grid) {
  return hk_dual_norm(F.values, k, grid);
}

}  // namespace chanstab
