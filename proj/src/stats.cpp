#include "fanotrap/stats.hpp"

#include <cmath>

namespace fanotrap {

double digamma(double x) {
  double acc = 0.0;
  while (x < 8.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Abramowitz & Stegun 6.3.18
  return acc + std::log(x) - 0.5 * inv -
         inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
}

double trigamma(double x) {
  double acc = 0.0;
  while (x < 8.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Abramowitz & Stegun 6.4.12
  return acc + inv * (1.0 + 0.5 * inv + inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 / 42.0)));
}

double log_psd_bias(int n_averages) {
  return digamma(static_cast<double>(n_averages)) - std::log(static_cast<double>(n_averages));
}

double log_psd_sigma(int n_averages) {
  return std::sqrt(trigamma(static_cast<double>(n_averages)));
}

}  // namespace fanotrap
