#include "chanstab/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "chanstab/errors.hpp"

namespace chanstab {

namespace {

double realized_constant(double lhs, double init, double nonlinear) {
  const double excess = lhs - init;
  if (!(excess > 0.0)) return 0.0;
  if (nonlinear > 0.0) return excess / nonlinear;
  return std::numeric_limits<double>::infinity();
}

}  // namespace

const std::vector<std::string>& bootstrap_families() {
  static const std::vector<std::string> names = {"vorticity", "mean_vorticity", "mean_temperature",
                                                 "temperature_low", "temperature_high"};
  return names;
}

double BootstrapReport::max_constant(const std::string& family) const {
  double c = 0.0;
  for (const auto& r : rows) {
    if (r.family == family && r.applies) c = std::max(c, r.constant);
  }
  return c;
}

BootstrapReport bootstrap_check(const std::vector<double>& E, const std::vector<double>& H,
                                double nu, double mu, const std::vector<double>& init_E,
                                const std::vector<double>& init_H) {
  const std::size_t size = E.size();
  if (size % 2 == 0 || H.size() != size || init_E.size() != size || init_H.size() != size) {
    throw InvalidArgument("bootstrap_check: vectors must share one odd length 2K + 1");
  }
  if (!(nu > 0.0) || !(mu > 0.0)) {
    throw InvalidArgument("bootstrap_check: nu and mu must be positive");
  }
  const int K = static_cast<int>(size / 2);
  const auto e = [&](int k) { return std::abs(k) <= K ? E[k + K] : 0.0; };
  const auto h = [&](int k) { return std::abs(k) <= K ? H[k + K] : 0.0; };

  // sum_l E_l X_{k-l} over |l| <= K, |k - l| <= K, with an optional filter on l.
  const auto convolve = [&](int k, auto&& x, auto&& keep) {
    double total = 0.0;
    for (int l = -K; l <= K; ++l) {
      if (std::abs(k - l) > K || !keep(l)) continue;
      total += e(l) * x(k - l);
    }
    return total;
  };
  const auto all = [](int) { return true; };

  BootstrapReport report;
  for (int k = -K; k <= K; ++k) {
    const double ak = std::abs(k);
    const bool low = mu * ak * ak <= 1.0;
    for (const auto& family : bootstrap_families()) {
      BootstrapRow row;
      row.k = k;
      row.family = family;
      if (family == "vorticity" && k != 0) {
        row.applies = true;
        row.lhs = e(k);
        row.init = init_E[k + K];
        row.nonlinear = std::pow(nu, -0.375) * std::pow(mu, -0.25) * h(k) +
                        std::pow(nu, -2.0 / 3.0) * convolve(k, e, all);
      } else if (family == "mean_vorticity" && k == 0) {
        row.applies = true;
        row.lhs = e(0);
        row.init = init_E[K];
        row.nonlinear = std::pow(nu, -0.5) * convolve(0, e, [](int l) { return l != 0; });
      } else if (family == "mean_temperature" && k == 0) {
        row.applies = true;
        row.lhs = h(0);
        row.init = init_H[K];
        double sum = 0.0;
        for (int l = -K; l <= K; ++l) {
          if (l != 0) sum += std::pow(std::abs(l), -0.125) * e(l) * h(-l);
        }
        row.nonlinear = std::pow(mu, -0.5) * sum;
      } else if (family == "temperature_low" && k != 0 && low) {
        row.applies = true;
        row.lhs = h(k);
        row.init = init_H[k + K];
        const double near = convolve(k, h, [&](int l) {
          return l != 0 && l != k && 2 * std::abs(k - l) <= std::abs(k);
        });
        row.nonlinear = std::pow(mu, -2.0 / 3.0) * convolve(k, h, all) +
                        std::pow(nu, -0.125) * std::pow(mu, -7.0 / 16.0) * near;
      } else if (family == "temperature_high" && k != 0 && !low) {
        row.applies = true;
        row.lhs = h(k);
        row.init = init_H[k + K];
        row.nonlinear = std::pow(mu, -0.625) * convolve(k, h, all) +
                        std::pow(mu, -0.375) * std::pow(nu, -0.125) * e(k) * h(0);
      }
      if (row.applies) row.constant = realized_constant(row.lhs, row.init, row.nonlinear);
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace chanstab
