#pragma once

// Resolvent norms along the imaginary axis, the pseudospectral bound
//   Psi(A) = inf_{lambda real} sigma_min(A - i lambda),
// the Orr-Sommerfeld resolvent constants, and log-log scaling fits.
//
// All norms are quadrature L2 norms: the singular values are those of the
// weighted interior block W^{1/2} A_II W^{-1/2}.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "chanstab/operators.hpp"

namespace chanstab {

struct LambdaRange {
  double lo;
  double hi;
};

/// [-4|k|, 5|k|]: the shear symbol k(1 - y^2) spans [0, k] plus margins.
LambdaRange default_lambda_range(int k);

struct ResolventProfile {
  int k = 0;
  double coeff = 0.0;
  std::vector<double> lambdas;  // strictly increasing
  std::vector<double> norms;    // ||(A - i k lambda)^{-1}||
};

struct ScalingFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double residual = 0.0;  // max |y - fit| / y over the data
};

double smallest_singular_value(const CMatrix& m);
double largest_singular_value(const CMatrix& m);

/// ||(A - i k lambda)^{-1}|| = 1 / sigma_min. Throws NumericalSingularity when the
/// shifted matrix is singular to working precision.
double resolvent_norm(const ModeOperator& op, double lambda);

ResolventProfile resolvent_sweep(const ModeOperator& op, const std::vector<double>& lambdas,
                                 int jobs = 1);

/// Location and value of a one-dimensional extremum found by coarse sampling
/// followed by golden-section refinement around the best local candidates.
struct LineSearchResult {
  double argument = 0.0;
  double value = 0.0;
};

/// Minimizes f over [range.lo, range.hi]. `seeds` are extra sample points
/// (e.g. imaginary parts of eigenvalues) where narrow dips are expected.
LineSearchResult minimize_on_interval(const std::function<double(double)>& f, LambdaRange range,
                                      int samples, const std::vector<double>& seeds = {},
                                      int jobs = 1);

struct PsiResult {
  double psi = 0.0;
  double lambda_star = 0.0;  // minimizer in the i*lambda convention
};

PsiResult psi_detail(const ModeOperator& op, LambdaRange range, int samples = 201, int jobs = 1);

double psi(const ModeOperator& op, LambdaRange range, int samples = 201);

/// Best constants of the Orr-Sommerfeld resolvent inequalities, each the supremum
/// over real lambda of the scaled norm of the solution map F -> output:
///   w_L2        (nu|k|)^{1/2}      ||w||          / ||F||
///   w_grad      nu^{3/4}|k|^{1/4}  ||(d_y,|k|)w|| / ||F||
///   u_L2        nu^{3/8}|k|^{9/8}  ||u||          / ||F||
///   w_from_Hm1  nu^{3/4}|k|^{1/4}  ||w||          / ||F||_{H_k^{-1}}
///   u_from_Hm1  (nu|k|)^{1/2}      ||u||          / ||F||_{H_k^{-1}}
std::map<std::string, double> verify_os_bounds(double nu, int k, const ChebyshevGrid& grid,
                                               int samples = 201, int jobs = 1);

/// Pointwise-in-lambda ratios for the lambda-dependent Orr-Sommerfeld bounds,
/// with m(lambda) = |lambda - 1|^{1/2} + |nu/k|^{1/4}:
///   u_L2        nu^{1/6}|k|^{5/6} m^{1/3} ||u|| / ||F||
///   w_grad      nu^{2/3}|k|^{1/3} m^{1/3} ||(d_y,|k|)w|| / ||F||
///   w_L2        nu^{1/3}|k|^{2/3} m^{2/3} ||w|| / ||F||
///   w_from_Hm1  nu^{2/3}|k|^{1/3} m^{1/3} ||w|| / ||F||_{H_k^{-1}}
struct OsLambdaRatios {
  double lambda = 0.0;
  double u_L2 = 0.0;
  double w_grad = 0.0;
  double w_L2 = 0.0;
  double w_from_Hm1 = 0.0;
};

std::vector<OsLambdaRatios> os_lambda_profile(double nu, int k, const ChebyshevGrid& grid,
                                              const std::vector<double>& lambdas, int jobs = 1);

/// Least-squares slope of log(ys) against log(xs). Needs >= 3 positive points.
ScalingFit fit_scaling(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace chanstab
