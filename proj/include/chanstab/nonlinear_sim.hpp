#pragma once

// Pseudospectral simulation of the perturbation system around Poiseuille flow
// in vorticity-temperature form, periodic in x (modes k = -K..K) and Chebyshev
// collocated in y:
//
//   d_t w + (1 - y^2) d_x w + 2 d_x Lap^{-1} w + u.grad w - nu Lap w = -d_x th
//   d_t th + (1 - y^2) d_x th + u.grad th - mu Lap th = 0
//   w = th = 0 at y = +-1
//
// Mode k != 0 is carried as w_k, th_k. The zero mode carries the mean streamwise
// velocity ubar (Neumann walls, mean vorticity w_0 = d_y ubar) and th_0
// (Dirichlet walls); the mean normal velocity is identically zero.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chanstab/ledger.hpp"
#include "chanstab/operators.hpp"

namespace chanstab {

struct SimConfig {
  double nu = 1e-2;
  double mu = 1e-2;
  int K = 16;
  int n = 64;
  double dt = 0.0;       // 0: min(0.5 / K, CFL limit of the initial state)
  double horizon = 0.0;  // 0: 10 / sqrt(nu)
  double c0 = 1e-3;
  double c1 = 1e-3;
  std::uint64_t seed = 0;
  double sobolev_s = 3.6;
  int ledger_every = 0;  // 0: about 200 ledger snapshots per run

  double resolved_horizon() const;
  /// Throws InvalidArgument on out-of-range fields (after resolving defaults).
  void validate() const;
};

class PerturbationState {
 public:
  PerturbationState(int K, ChebyshevGrid grid);

  int K() const noexcept { return K_; }
  const ChebyshevGrid& grid() const noexcept { return grid_; }

  CVector& omega(int k) { return omega_.at(k + K_); }
  const CVector& omega(int k) const { return omega_.at(k + K_); }
  CVector& theta(int k) { return theta_.at(k + K_); }
  const CVector& theta(int k) const { return theta_.at(k + K_); }

  /// Mean streamwise velocity (real). omega(0) is kept equal to its derivative.
  RVector& u1_mean() { return u1_mean_; }
  const RVector& u1_mean() const { return u1_mean_; }

  double t = 0.0;

  /// Overwrites negative modes with conjugates of positive ones, makes the zero
  /// mode real, refreshes omega(0) = d_y ubar and zeroes the Dirichlet walls.
  void normalize();

  /// max |w_{-k} - conj(w_k)|, |th_{-k} - conj(th_k)| over all k and nodes.
  double reality_defect() const;
  /// max |w_k(+-1)| (k != 0) and |th_k(+-1)| (all k).
  double boundary_defect() const;
  bool all_finite() const;

 private:
  int K_;
  ChebyshevGrid grid_;
  std::vector<CVector> omega_;
  std::vector<CVector> theta_;
  RVector u1_mean_;
};

/// Cached Dirichlet Helmholtz inverses for k = 0..K.
class VelocityMap {
 public:
  VelocityMap(const ChebyshevGrid& grid, int K);
  /// (u1_k, u2_k); for k = 0 this is (ubar, 0).
  Velocity operator()(const PerturbationState& s, int k) const;

 private:
  ChebyshevGrid grid_;
  int K_;
  std::vector<RMatrix> inverse_;  // index |k|
};

struct InitialShape {
  enum class Kind { single_mode, random_band };
  Kind kind = Kind::random_band;
  int k = 1;  // single_mode only

  static InitialShape single_mode(int k) { return {Kind::single_mode, k}; }
  static InitialShape random_band() { return {Kind::random_band, 0}; }
};

/// sqrt(sum_k (1 + k^2)^s ||u_k||^2): the Sobolev proxy for the initial velocity.
double velocity_proxy(const PerturbationState& s, double sobolev_s);

/// sqrt(sum_k (1 + |k|^{1/4}) (||th_k||^2 + ||d_y th_k||^2 + k^2 ||th_k||^2)): the proxy
/// for ||th||_{H^1} + || |D_x|^{1/8} th ||_{H^1}.
double temperature_proxy(const PerturbationState& s);

/// Velocity amplitude c0 min(nu, mu)^{2/3}, temperature amplitude c1 min(nu, mu)^{31/24}.
PerturbationState make_initial_data(const SimConfig& config, const InitialShape& shape);

/// Same profiles, explicit proxy amplitudes.
PerturbationState make_initial_data(const SimConfig& config, const InitialShape& shape,
                                    double velocity_amplitude, double temperature_amplitude);

/// f1_k = sum_l u1_l w_{k-l}, f2_k = sum_l u2_l w_{k-l}, g1, g2 likewise with th,
/// indexed by k + K and truncated to |k| <= K.
struct NonlinearTerms {
  std::vector<CVector> f1, f2, g1, g2;
  /// max_j (K max_x |u1| + max_x |u2| / h_j) with h_j the local node spacing.
  double advection_rate = 0.0;
};

NonlinearTerms nonlinear_terms(const PerturbationState& s);
NonlinearTerms nonlinear_terms(const PerturbationState& s, const VelocityMap& velocity);

/// Second-order exponential integrator. Each mode's linear operator (shear,
/// nonlocal term, diffusion) is propagated exactly; the nonlinear terms and the
/// buoyancy coupling enter through the phi-function quadrature with a two-step
/// extrapolation. The first step is two first-order half steps.
class Stepper {
 public:
  /// Uses config.dt, which must already be positive.
  explicit Stepper(const SimConfig& config);

  double dt() const noexcept { return dt_; }
  int steps_taken() const noexcept { return steps_; }

  /// Advances s by dt in place. A CFL breach on the first step throws
  /// InvalidArgument; later breaches and non-finite states throw Diverged.
  void step(PerturbationState& s);

  const VelocityMap& velocity_map() const noexcept { return velocity_; }

  struct Tables;

 private:
  void half_step_pair(PerturbationState& s, const std::vector<CVector>& n0w,
                      const std::vector<CVector>& n0t);

  SimConfig config_;
  double dt_;
  int steps_ = 0;
  std::shared_ptr<const Tables> tables_;
  VelocityMap velocity_;
  std::vector<CVector> prev_w_, prev_t_;
};

/// One step from a fresh stepper (startup scheme).
PerturbationState step(const PerturbationState& s, const SimConfig& config);

/// dt chosen when config.dt == 0.
double auto_dt(const SimConfig& config, const PerturbationState& initial);

/// Per-mode norms at the current instant, indexed by k + K.
std::vector<ModeNorms> mode_norms(const PerturbationState& s, const VelocityMap& velocity);

/// Initial-data terms of the bootstrap inequalities: ||Lap_k w_0|| and
/// |k|^{1/8} ||th_0|| for k != 0, ||w_0|| and ||th_0|| for k = 0.
struct InitialNorms {
  std::vector<double> E;  // indexed by k + K
  std::vector<double> H;
  double velocity_proxy = 0.0;
  double temperature_proxy = 0.0;
  double E_total() const;
  double H_total() const;
};

InitialNorms initial_norms(const PerturbationState& s, double sobolev_s);

struct RunResult {
  PerturbationState final_state;
  EnergyLedger ledger;
  std::vector<EnergyLedger> history;  // snapshots every ledger_every steps and at the end
  InitialNorms initial;
  double dt = 0.0;
  int steps = 0;
  bool diverged = false;
  double diverged_at = 0.0;
  std::string message;

  double E_total() const;
  double H_total() const;
  /// sum_k (E_k + H_k) over the same sum of initial-data terms (0 if both vanish).
  double growth_ratio() const;
};

/// Runs to the horizon. Divergence does not throw: the partial ledger is
/// returned with diverged = true.
RunResult run(const SimConfig& config, const PerturbationState& initial);

}  // namespace chanstab
