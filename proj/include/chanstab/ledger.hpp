#pragma once

// Running accumulators for the per-mode energy functionals
//   E_k = ||w_k||_{Linf L2} + (nu|k|)^{1/4} ||w_k||_{L2L2} + (nu k^2)^{1/2} ||w_k||_{L2L2}
//         + |k|^{1/2} ||u_k||_{L2L2}                                   (k != 0)
//   E_0 = ||w_0||_{Linf L2}
//   H_k = |k|^{1/8} ||th_k||_{Linf L2} + mu^{1/4}|k|^{3/8} ||th_k||_{L2L2}
//         + mu^{1/2}|k|^{9/8} ||th_k||_{L2L2}                           (k != 0)
//   H_0 = ||th_0||_{Linf L2}

#include <string>
#include <vector>

namespace chanstab {

/// Instantaneous L2 norms of one mode.
struct ModeNorms {
  double omega = 0.0;
  double velocity = 0.0;
  double theta = 0.0;
};

class EnergyLedger {
 public:
  EnergyLedger() = default;
  EnergyLedger(int K, double nu, double mu);

  int K() const noexcept { return K_; }
  double time() const noexcept { return t_; }
  bool empty() const noexcept { return !started_; }

  /// Adds the sample at time t (must not precede the previous one). norms is
  /// indexed by k + K. Suprema are running maxima; time integrals of squares use
  /// the trapezoid rule between consecutive samples.
  void record(double t, const std::vector<ModeNorms>& norms);

  double omega_sup(int k) const { return omega_sup_.at(k + K_); }
  double omega_l2l2(int k) const;
  double velocity_l2l2(int k) const;
  double theta_sup(int k) const { return theta_sup_.at(k + K_); }
  double theta_l2l2(int k) const;

  double E(int k) const;
  double H(int k) const;
  std::vector<double> E_all() const;  // indexed by k + K
  std::vector<double> H_all() const;

  /// Component names in the order used by CSV output.
  static const std::vector<std::string>& component_names();
  double component(const std::string& name, int k) const;

 private:
  int K_ = 0;
  double nu_ = 0.0;
  double mu_ = 0.0;
  double t_ = 0.0;
  bool started_ = false;
  std::vector<ModeNorms> last_;
  std::vector<double> omega_sup_, theta_sup_;
  std::vector<double> omega_sq_, velocity_sq_, theta_sq_;
};

}  // namespace chanstab
