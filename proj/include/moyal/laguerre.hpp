#pragma once

#include <cmath>
#include <complex>

#include "moyal/error.hpp"

namespace moyal {

inline constexpr int kMaxBasisIndex = 64;

// Generalized Laguerre L_n^α(x) by upward recurrence in n.
inline double laguerre(int n, double alpha, double x) {
  if (n < 0) throw RangeError("negative Laguerre degree");
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 1.0 + alpha - x;
  for (int j = 1; j < n; ++j) {
    const double next = ((2.0 * j + 1.0 + alpha - x) * cur - (j + alpha) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

// Basis function f_kl(x1, x2) of the D=2 matrix base.
inline std::complex<double> fkl_value(int k, int l, double theta, double x1, double x2) {
  if (k < 0 || l < 0) throw RangeError("basis index must be non-negative");
  if (k > kMaxBasisIndex || l > kMaxBasisIndex) throw RangeError("basis index exceeds 64");
  if (k > l) return std::conj(fkl_value(l, k, theta, x1, x2));
  const int d = l - k;
  const double r2 = x1 * x1 + x2 * x2;
  const double u = 2.0 * r2 / theta;
  double mag;
  if (d > 0 && u == 0.0) {
    mag = 0.0;
  } else {
    const double logpre = 0.5 * (std::lgamma(k + 1.0) - std::lgamma(l + 1.0)) +
                          (d > 0 ? 0.5 * d * std::log(u) : 0.0) - 0.5 * u;
    mag = 2.0 * std::exp(logpre) * laguerre(k, d, u);
  }
  if (k % 2) mag = -mag;
  const double phi = std::atan2(x2, x1);
  return std::polar(1.0, d * phi) * mag;
}

}  // namespace moyal
