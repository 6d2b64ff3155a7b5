#include "chanstab/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "chanstab/errors.hpp"

namespace chanstab {

EnergyLedger::EnergyLedger(int K, double nu, double mu)
    : K_(K),
      nu_(nu),
      mu_(mu),
      last_(2 * K + 1),
      omega_sup_(2 * K + 1, 0.0),
      theta_sup_(2 * K + 1, 0.0),
      omega_sq_(2 * K + 1, 0.0),
      velocity_sq_(2 * K + 1, 0.0),
      theta_sq_(2 * K + 1, 0.0) {
  if (K < 0 || !(nu > 0.0) || !(mu > 0.0)) {
    throw InvalidArgument("EnergyLedger: need K >= 0 and positive nu, mu");
  }
}

void EnergyLedger::record(double t, const std::vector<ModeNorms>& norms) {
  if (norms.size() != last_.size()) {
    throw InvalidArgument("EnergyLedger::record: expected one entry per mode");
  }
  if (started_ && t < t_) {
    throw InvalidArgument("EnergyLedger::record: samples must be in time order");
  }
  const double half = started_ ? 0.5 * (t - t_) : 0.0;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    const ModeNorms& a = last_[i];
    const ModeNorms& b = norms[i];
    omega_sup_[i] = std::max(omega_sup_[i], b.omega);
    theta_sup_[i] = std::max(theta_sup_[i], b.theta);
    omega_sq_[i] += half * (a.omega * a.omega + b.omega * b.omega);
    velocity_sq_[i] += half * (a.velocity * a.velocity + b.velocity * b.velocity);
    theta_sq_[i] += half * (a.theta * a.theta + b.theta * b.theta);
  }
  last_ = norms;
  t_ = t;
  started_ = true;
}

double EnergyLedger::omega_l2l2(int k) const { return std::sqrt(omega_sq_.at(k + K_)); }
double EnergyLedger::velocity_l2l2(int k) const { return std::sqrt(velocity_sq_.at(k + K_)); }
double EnergyLedger::theta_l2l2(int k) const { return std::sqrt(theta_sq_.at(k + K_)); }

double EnergyLedger::E(int k) const {
  if (k == 0) return omega_sup(0);
  const double ak = std::abs(k);
  return omega_sup(k) + std::pow(nu_ * ak, 0.25) * omega_l2l2(k) +
         std::sqrt(nu_ * ak * ak) * omega_l2l2(k) + std::sqrt(ak) * velocity_l2l2(k);
}

double EnergyLedger::H(int k) const {
  if (k == 0) return theta_sup(0);
  const double ak = std::abs(k);
  return std::pow(ak, 0.125) * theta_sup(k) +
         std::pow(mu_, 0.25) * std::pow(ak, 0.375) * theta_l2l2(k) +
         std::sqrt(mu_) * std::pow(ak, 1.125) * theta_l2l2(k);
}

std::vector<double> EnergyLedger::E_all() const {
  std::vector<double> out;
  for (int k = -K_; k <= K_; ++k) out.push_back(E(k));
  return out;
}

std::vector<double> EnergyLedger::H_all() const {
  std::vector<double> out;
  for (int k = -K_; k <= K_; ++k) out.push_back(H(k));
  return out;
}

const std::vector<std::string>& EnergyLedger::component_names() {
  static const std::vector<std::string> names = {"E",          "H",          "omega_Linf",
                                                 "omega_L2L2", "u_L2L2",     "theta_Linf",
                                                 "theta_L2L2"};
  return names;
}

double EnergyLedger::component(const std::string& name, int k) const {
  if (name == "E") return E(k);
  if (name == "H") return H(k);
  if (name == "omega_Linf") return omega_sup(k);
  if (name == "omega_L2L2") return omega_l2l2(k);
  if (name == "u_L2L2") return velocity_l2l2(k);
  if (name == "theta_Linf") return theta_sup(k);
  if (name == "theta_L2L2") return theta_l2l2(k);
  throw InvalidArgument("EnergyLedger: unknown component " + name);
}

}  // namespace chanstab
