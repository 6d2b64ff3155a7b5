#include "chanstab/operators.hpp"

#include <cmath>
#include <string>

#include "chanstab/errors.hpp"

namespace chanstab {

namespace {

void require_positive(double coeff, const char* name) {
  if (!(coeff > 0.0) || !std::isfinite(coeff)) {
    throw InvalidArgument(std::string(name) + " must be positive and finite");
  }
}

void require_nonzero_k(int k, const char* where) {
  if (k == 0) {
    throw InvalidArgument(std::string(where) + ": wavenumber must be nonzero");
  }
}

CMatrix with_boundary_rows(CMatrix m) {
  const Eigen::Index n = m.rows() - 1;
  m.row(0).setZero();
  m.row(n).setZero();
  m(0, 0) = 1.0;
  m(n, n) = 1.0;
  return m;
}

CMatrix diffusion_part(double coeff, int k, const ChebyshevGrid& grid) {
  CMatrix m = (-coeff * grid.d2()).cast<Complex>();
  m.diagonal().array() += coeff * static_cast<double>(k) * k;
  return m;
}

CMatrix shear_part(int k, const ChebyshevGrid& grid) {
  const RVector profile = 1.0 - grid.nodes().array().square();
  return (Complex(0.0, k) * profile.cast<Complex>()).asDiagonal();
}

}  // namespace

const char* to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::orr_sommerfeld:
      return "orr_sommerfeld";
    case OperatorKind::advection_diffusion:
      return "advection_diffusion";
    case OperatorKind::diffusion:
      return "diffusion";
    case OperatorKind::shear:
      return "shear";
  }
  return "unknown";
}

RVector interior_weights(const ChebyshevGrid& grid) {
  return grid.weights().segment(1, grid.interior_size());
}

ModeOperator::ModeOperator(OperatorKind kind, int k, double coeff, ChebyshevGrid grid,
                           CMatrix matrix)
    : kind_(kind), k_(k), coeff_(coeff), grid_(std::move(grid)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != grid_.size() || matrix_.cols() != grid_.size()) {
    throw InvalidArgument("ModeOperator: matrix does not match grid");
  }
  const RVector s = interior_weights(grid_).array().sqrt();
  const RVector inv_s = s.cwiseInverse();
  weighted_ = s.asDiagonal() * interior() * inv_s.asDiagonal();
}

CMatrix ModeOperator::interior() const {
  const int m = grid_.interior_size();
  return matrix_.block(1, 1, m, m);
}

CVector ModeOperator::apply(const CVector& x) const {
  require_on_grid(x, grid_, "ModeOperator::apply");
  return matrix_ * x;
}

CVector ModeOperator::solve_shifted(Complex shift, const CVector& b) const {
  require_on_grid(b, grid_, "ModeOperator::solve_shifted");
  const int m = grid_.interior_size();
  CMatrix a = interior();
  a.diagonal().array() += shift;
  Eigen::PartialPivLU<CMatrix> lu(a);
  CVector x = CVector::Zero(grid_.size());
  x.segment(1, m) = lu.solve(b.segment(1, m));
  if (!x.allFinite()) {
    throw NumericalSingularity("shifted solve failed");
  }
  return x;
}

ModeOperator assemble_H(double mu, int k, const ChebyshevGrid& grid) {
  require_positive(mu, "mu");
  require_nonzero_k(k, "assemble_H");
  CMatrix m = diffusion_part(mu, k, grid) + shear_part(k, grid);
  return {OperatorKind::advection_diffusion, k, mu, grid, with_boundary_rows(std::move(m))};
}

ModeOperator assemble_L(double nu, int k, const ChebyshevGrid& grid) {
  require_positive(nu, "nu");
  require_nonzero_k(k, "assemble_L");
  const HelmholtzSolver helmholtz(grid, k);
  CMatrix m = diffusion_part(nu, k, grid) + shear_part(k, grid) +
              Complex(0.0, 2.0 * k) * helmholtz.inverse().cast<Complex>();
  return {OperatorKind::orr_sommerfeld, k, nu, grid, with_boundary_rows(std::move(m))};
}

ModeOperator assemble_diffusion(double mu, int k, const ChebyshevGrid& grid) {
  require_positive(mu, "mu");
  return {OperatorKind::diffusion, k, mu, grid, with_boundary_rows(diffusion_part(mu, k, grid))};
}

ModeOperator assemble_shear(int k, const ChebyshevGrid& grid) {
  return {OperatorKind::shear, k, 0.0, grid, with_boundary_rows(shear_part(k, grid))};
}

ModeOperator assemble(OperatorKind kind, double coeff, int k, const ChebyshevGrid& grid) {
  switch (kind) {
    case OperatorKind::orr_sommerfeld:
      return assemble_L(coeff, k, grid);
    case OperatorKind::advection_diffusion:
      return assemble_H(coeff, k, grid);
    case OperatorKind::diffusion:
      return assemble_diffusion(coeff, k, grid);
    case OperatorKind::shear:
      return assemble_shear(k, grid);
  }
  throw InvalidArgument("unknown operator kind");
}

Velocity velocity_from_vorticity(const FieldMode& omega, int k, const ChebyshevGrid& grid) {
  require_on_grid(omega.values, grid, "velocity_from_vorticity");
  require_nonzero_k(k, "velocity_from_vorticity");
  const CVector phi = HelmholtzSolver(grid, k).solve(omega.values);
  Velocity v;
  v.u1 = {k, grid.d1() * phi};
  v.u2 = {k, Complex(0.0, -k) * phi};
  return v;
}

double accretivity_check(const ModeOperator& op) {
  const CMatrix& b = op.weighted();
  const CMatrix herm = 0.5 * (b + b.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace chanstab
