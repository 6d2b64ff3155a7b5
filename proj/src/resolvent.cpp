#include "chanstab/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "chanstab/errors.hpp"
#include "chanstab/parallel.hpp"

namespace chanstab {

namespace {

constexpr double kGolden = 0.6180339887498949;

// Golden-section search on a bracket a < x < b with f(x) <= f(a), f(b). The
// bracket always contains the best point seen, so a narrow dip at x is kept.
double golden_section(const std::function<double(double)>& f, double a, double x, double b,
                      double fx) {
  const double tol = 1e-12 * std::max(1.0, std::abs(a) + std::abs(b));
  for (int it = 0; it < 300 && (b - a) > tol; ++it) {
    const bool left = (x - a) > (b - x);
    const double u = left ? x - (1.0 - kGolden) * (x - a) : x + (1.0 - kGolden) * (b - x);
    const double fu = f(u);
    if (fu < fx) {
      (left ? b : a) = x;
      x = u;
      fx = fu;
    } else {
      (left ? a : b) = u;
    }
  }
  return fx;
}

// Output and input maps for the Orr-Sommerfeld solution operator on interior
// profiles. Rows of the output maps are weighted so Euclidean norms are L2 norms.
struct OsMaps {
  CMatrix a;           // unweighted interior block of L_nu
  CMatrix w_out;       // w      -> W^{1/2} w
  CMatrix grad_out;    // w      -> (W^{1/2} d_y w, |k| W^{1/2} w)
  CMatrix u_out;       // w      -> (W^{1/2} u1, W^{1/2} u2)
  CMatrix l2_in;       // unit   -> F with ||F||_{L2} = 1
  CMatrix hm1_in;      // unit   -> F with ||F||_{H_k^{-1}} = 1
};

OsMaps build_os_maps(double nu, int k, const ChebyshevGrid& grid) {
  const ModeOperator op = assemble_L(nu, k, grid);
  const int n = grid.degree();
  const int m = grid.interior_size();
  const RVector s_int = interior_weights(grid).array().sqrt();
  const RVector s_full = grid.weights().array().sqrt();
  const RMatrix d1_cols = grid.d1().middleCols(1, m);
  const RMatrix hinv = HelmholtzSolver(grid, k).inverse().block(1, 1, m, m);
  const double ak = std::abs(static_cast<double>(k));

  OsMaps maps;
  maps.a = op.interior();
  maps.w_out = s_int.asDiagonal().toDenseMatrix().cast<Complex>();

  maps.grad_out = CMatrix::Zero(n + 1 + m, m);
  maps.grad_out.topRows(n + 1) = (s_full.asDiagonal() * d1_cols).cast<Complex>();
  maps.grad_out.bottomRows(m) = (ak * s_int).asDiagonal().toDenseMatrix().cast<Complex>();

  maps.u_out = CMatrix::Zero(n + 1 + m, m);
  maps.u_out.topRows(n + 1) = (s_full.asDiagonal() * d1_cols * hinv).cast<Complex>();
  maps.u_out.bottomRows(m) = Complex(0.0, -k) * (s_int.asDiagonal() * hinv).cast<Complex>();

  maps.l2_in = s_int.cwiseInverse().asDiagonal().toDenseMatrix().cast<Complex>();

  // ||F||^2_{H^{-1}} = F^* G F with G the Hermitian part of W (k^2 - d_yy)^{-1}.
  const RMatrix wk = interior_weights(grid).asDiagonal() * (-hinv);
  const RMatrix g = 0.5 * (wk + wk.transpose());
  Eigen::SelfAdjointEigenSolver<RMatrix> es(g);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw NumericalSingularity("H^{-1} Gram matrix is not positive definite");
  }
  maps.hm1_in = (es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                 es.eigenvectors().transpose())
                    .cast<Complex>();
  return maps;
}

struct OsNorms {
  double w_l2 = 0.0;     // ||w|| / ||F||_{L2}
  double w_grad = 0.0;   // ||(d_y,|k|)w|| / ||F||_{L2}
  double u_l2 = 0.0;     // ||u|| / ||F||_{L2}
  double w_hm1 = 0.0;    // ||w|| / ||F||_{H^{-1}}
  double u_hm1 = 0.0;    // ||u|| / ||F||_{H^{-1}}
};

// shift is in the i*s convention: R = (A - i s)^{-1}.
OsNorms os_norms_at(const OsMaps& maps, double shift) {
  CMatrix a = maps.a;
  a.diagonal().array() -= Complex(0.0, shift);
  Eigen::PartialPivLU<CMatrix> lu(a);
  const CMatrix r_l2 = lu.solve(maps.l2_in);
  const CMatrix r_hm1 = lu.solve(maps.hm1_in);
  if (!r_l2.allFinite() || !r_hm1.allFinite()) {
    throw NumericalSingularity("Orr-Sommerfeld resolvent solve failed");
  }
  OsNorms out;
  out.w_l2 = largest_singular_value(maps.w_out * r_l2);
  out.w_grad = largest_singular_value(maps.grad_out * r_l2);
  out.u_l2 = largest_singular_value(maps.u_out * r_l2);
  out.w_hm1 = largest_singular_value(maps.w_out * r_hm1);
  out.u_hm1 = largest_singular_value(maps.u_out * r_hm1);
  return out;
}

std::vector<double> eigen_seeds(const CMatrix& a, double scale, LambdaRange range) {
  Eigen::ComplexEigenSolver<CMatrix> es(a, false);
  std::vector<double> seeds;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double s = es.eigenvalues()(i).imag() / scale;
    if (s >= range.lo && s <= range.hi) seeds.push_back(s);
  }
  return seeds;
}

}  // namespace

LambdaRange default_lambda_range(int k) {
  const double ak = std::max(1.0, std::abs(static_cast<double>(k)));
  return {-4.0 * ak, 5.0 * ak};
}

double smallest_singular_value(const CMatrix& m) {
  Eigen::BDCSVD<CMatrix> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

double largest_singular_value(const CMatrix& m) {
  const CMatrix gram = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double resolvent_norm(const ModeOperator& op, double lambda) {
  if (!std::isfinite(lambda)) {
    throw InvalidArgument("resolvent_norm: lambda must be finite");
  }
  CMatrix shifted = op.weighted();
  shifted.diagonal().array() -= Complex(0.0, op.k() * lambda);
  Eigen::BDCSVD<CMatrix> svd(shifted);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (!(smin > std::numeric_limits<double>::epsilon() * sv(0))) {
    throw NumericalSingularity("resolvent_norm: shifted operator singular at lambda = " +
                               std::to_string(lambda));
  }
  return 1.0 / smin;
}

ResolventProfile resolvent_sweep(const ModeOperator& op, const std::vector<double>& lambdas,
                                 int jobs) {
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > lambdas[i - 1])) {
      throw InvalidArgument("resolvent_sweep: lambdas must be strictly increasing");
    }
  }
  ResolventProfile p;
  p.k = op.k();
  p.coeff = op.coeff();
  p.lambdas = lambdas;
  p.norms = parallel_map(lambdas.size(), jobs,
                         [&](std::size_t i) { return resolvent_norm(op, lambdas[i]); });
  return p;
}

LineSearchResult minimize_on_interval(const std::function<double(double)>& f, LambdaRange range,
                                      int samples, const std::vector<double>& seeds, int jobs) {
  if (!(range.hi > range.lo) || samples < 2) {
    throw InvalidArgument("minimize_on_interval: empty range or too few samples");
  }
  std::vector<double> xs;
  xs.reserve(samples + seeds.size());
  for (int i = 0; i < samples; ++i) {
    xs.push_back(range.lo + (range.hi - range.lo) * i / (samples - 1));
  }
  for (double s : seeds) {
    if (s >= range.lo && s <= range.hi) xs.push_back(s);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  const std::vector<double> fs = parallel_map(xs.size(), jobs, [&](std::size_t i) { return f(xs[i]); });

  // Refine the best few local minima; the global one can sit in a narrow dip
  // next to a slightly higher coarse sample.
  std::vector<std::size_t> minima;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const bool left = i == 0 || fs[i] <= fs[i - 1];
    const bool right = i + 1 == xs.size() || fs[i] <= fs[i + 1];
    if (left && right) minima.push_back(i);
  }
  std::sort(minima.begin(), minima.end(), [&](auto a, auto b) { return fs[a] < fs[b]; });
  if (minima.size() > 5) minima.resize(5);

  LineSearchResult best{xs[minima.front()], fs[minima.front()]};
  for (std::size_t i : minima) {
    const double a = xs[i == 0 ? 0 : i - 1];
    const double b = xs[i + 1 == xs.size() ? i : i + 1];
    double arg = xs[i];
    double val = fs[i];
    auto tracked = [&](double x) {
      const double v = f(x);
      if (v < val) {
        val = v;
        arg = x;
      }
      return v;
    };
    if (b > a) golden_section(tracked, a, xs[i], b, fs[i]);
    if (val < best.value) best = {arg, val};
  }
  return best;
}

PsiResult psi_detail(const ModeOperator& op, LambdaRange range, int samples, int jobs) {
  if (!(range.hi > range.lo)) {
    throw InvalidArgument("psi: empty lambda range");
  }
  const CMatrix& b = op.weighted();
  auto sigma_min = [&](double s) {
    CMatrix shifted = b;
    shifted.diagonal().array() -= Complex(0.0, s);
    return smallest_singular_value(shifted);
  };
  const auto r = minimize_on_interval(sigma_min, range, samples, eigen_seeds(b, 1.0, range), jobs);
  return {r.value, r.argument};
}

double psi(const ModeOperator& op, LambdaRange range, int samples) {
  return psi_detail(op, range, samples).psi;
}

std::map<std::string, double> verify_os_bounds(double nu, int k, const ChebyshevGrid& grid,
                                               int samples, int jobs) {
  if (!(nu > 0.0) || k == 0) {
    throw InvalidArgument("verify_os_bounds: need nu > 0 and k != 0");
  }
  const OsMaps maps = build_os_maps(nu, k, grid);
  const double ak = std::abs(static_cast<double>(k));
  const LambdaRange range = default_lambda_range(k);
  const std::vector<double> seeds = eigen_seeds(maps.a, 1.0, range);

  struct Entry {
    const char* name;
    double scale;
    double OsNorms::*field;
  };
  const Entry entries[] = {
      {"w_L2", std::sqrt(nu * ak), &OsNorms::w_l2},
      {"w_grad", std::pow(nu, 0.75) * std::pow(ak, 0.25), &OsNorms::w_grad},
      {"u_L2", std::pow(nu, 0.375) * std::pow(ak, 1.125), &OsNorms::u_l2},
      {"w_from_Hm1", std::pow(nu, 0.75) * std::pow(ak, 0.25), &OsNorms::w_hm1},
      {"u_from_Hm1", std::sqrt(nu * ak), &OsNorms::u_hm1},
  };

  std::map<std::string, double> out;
  for (const auto& e : entries) {
    auto neg = [&](double s) { return -(os_norms_at(maps, s).*(e.field)); };
    const auto r = minimize_on_interval(neg, range, samples, seeds, jobs);
    out[e.name] = e.scale * (-r.value);
  }
  return out;
}

std::vector<OsLambdaRatios> os_lambda_profile(double nu, int k, const ChebyshevGrid& grid,
                                              const std::vector<double>& lambdas, int jobs) {
  if (!(nu > 0.0) || k == 0) {
    throw InvalidArgument("os_lambda_profile: need nu > 0 and k != 0");
  }
  const OsMaps maps = build_os_maps(nu, k, grid);
  const double ak = std::abs(static_cast<double>(k));
  return parallel_map(lambdas.size(), jobs, [&](std::size_t i) {
    const double lambda = lambdas[i];
    const OsNorms r = os_norms_at(maps, k * lambda);
    const double m = std::sqrt(std::abs(lambda - 1.0)) + std::pow(nu / ak, 0.25);
    OsLambdaRatios row;
    row.lambda = lambda;
    row.u_L2 = std::pow(nu, 1.0 / 6) * std::pow(ak, 5.0 / 6) * std::cbrt(m) * r.u_l2;
    row.w_grad = std::pow(nu, 2.0 / 3) * std::cbrt(ak) * std::cbrt(m) * r.w_grad;
    row.w_L2 = std::cbrt(nu) * std::pow(ak, 2.0 / 3) * std::pow(m, 2.0 / 3) * r.w_l2;
    row.w_from_Hm1 = std::pow(nu, 2.0 / 3) * std::cbrt(ak) * std::cbrt(m) * r.w_hm1;
    return row;
  });
}

ScalingFit fit_scaling(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 3) {
    throw InvalidArgument("fit_scaling: need at least 3 matched points");
  }
  const std::size_t n = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0) || !std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      throw InvalidArgument("fit_scaling: entries must be positive and finite");
    }
    const double lx = std::log(xs[i]);
    const double ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) {
    throw InvalidArgument("fit_scaling: xs must not all be equal");
  }
  ScalingFit fit;
  fit.exponent = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.exponent * sx) / n;
  fit.prefactor = std::exp(intercept);
  for (std::size_t i = 0; i < n; ++i) {
    const double model = fit.prefactor * std::pow(xs[i], fit.exponent);
    fit.residual = std::max(fit.residual, std::abs(ys[i] - model) / ys[i]);
  }
  return fit;
}

}  // namespace chanstab
