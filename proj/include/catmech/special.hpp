#pragma once

#include "catmech/common.hpp"

namespace catmech {

/// Gamma(1/2 + k) for integer k >= 0, via the recurrence from Gamma(1/2) = sqrt(pi).
inline double gamma_half_integer(int k) {
  if (k < 0) throw config_error("gamma_half_integer: k must be >= 0");
  double v = std::sqrt(pi);
  for (int j = 0; j < k; ++j) v *= 0.5 + j;
  return v;
}

/// Terminating Kummer confluent hypergeometric M(-l, 1/2, z): the degree-l
/// polynomial sum_{j=0..l} (-1)^j C(l,j) z^j / (1/2)_j. For z <= 0 every term
/// is non-negative, so the evaluation is cancellation-free.
inline double kummer_terminating(int l, double z) {
  if (l < 0) throw config_error("kummer_terminating: l must be >= 0");
  double term = 1.0;
  kahan_sum acc;
  acc.add(term);
  for (int j = 1; j <= l; ++j) {
    // term_j / term_{j-1} = -z (l - j + 1) / (j (1/2 + j - 1))
    term *= -z * static_cast<double>(l - j + 1) / (static_cast<double>(j) * (j - 0.5));
    acc.add(term);
  }
  return acc.value();
}

/// ln k!
inline double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

/// Binomial coefficient as a double (exact for the small arguments used here).
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double v = 1.0;
  for (int j = 1; j <= k; ++j) v *= static_cast<double>(n - k + j) / j;
  return v;
}

}  // namespace catmech
