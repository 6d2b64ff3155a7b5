#pragma once

// Realized constants of the bootstrap inequalities on measured ledgers.
//
// Every inequality is read as  LHS <= init + C * nonlinear  and the reported
// constant is C = max(0, LHS - init) / nonlinear (0 when LHS <= init, infinite
// when the nonlinear side vanishes but LHS exceeds init). Families:
//   vorticity    E_k <= ||Lap_k w_0|| + C (nu^{-3/8} mu^{-1/4} H_k + nu^{-2/3} sum_l E_l E_{k-l})
//   mean_vorticity  E_0 <= ||w_0|| + C nu^{-1/2} sum_{l != 0} E_l E_{-l}
//   mean_temperature  H_0 <= ||th_0|| + C mu^{-1/2} sum_{l != 0} |l|^{-1/8} E_l H_{-l}
//   temperature_low (mu k^2 <= 1)
//       H_k <= |k|^{1/8}||th_0|| + C (mu^{-2/3} sum_l E_l H_{k-l}
//              + nu^{-1/8} mu^{-7/16} sum_{l not in {0,k}, |k-l| <= |k|/2} E_l H_{k-l})
//   temperature_high (mu k^2 > 1)
//       H_k <= |k|^{1/8}||th_0|| + C (mu^{-5/8} sum_l E_l H_{k-l} + mu^{-3/8} nu^{-1/8} E_k H_0)
// Convolution sums run over |l| <= K and |k - l| <= K.

#include <string>
#include <vector>

namespace chanstab {

struct BootstrapRow {
  int k = 0;
  std::string family;
  bool applies = false;  // families that do not apply to this k carry zeros
  double lhs = 0.0;
  double init = 0.0;
  double nonlinear = 0.0;
  double constant = 0.0;
};

struct BootstrapReport {
  std::vector<BootstrapRow> rows;  // five rows per k, k ascending

  /// Largest constant of a family over the k where it applies.
  double max_constant(const std::string& family) const;
};

const std::vector<std::string>& bootstrap_families();

/// E, H, init_E, init_H are indexed by k + K and must share an odd length 2K + 1.
BootstrapReport bootstrap_check(const std::vector<double>& E, const std::vector<double>& H,
                                double nu, double mu, const std::vector<double>& init_E,
                                const std::vector<double>& init_H);

}  // namespace chanstab
