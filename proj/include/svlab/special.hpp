#pragma once

#include <cmath>

namespace svlab {

// Principal branch of the Lambert W function, W(y) e^{W(y)} = y, for
// y >= -1/e. Safeguarded Halley iteration; round-trip residual
// |W e^W - y| <= 1e-12 max(1, |y|) across the full domain.
double lambert_w0(double y);

// log K_nu(z) for real order nu >= 0 and z > 0, via adaptive quadrature of
// the cosh integral representation. Stays finite far past the underflow
// point of K itself.
double log_bessel_k(double nu, double z);

// log[(2k)! / (2^k k!)] -- the 2k-th moment factor of a unit Gaussian.
inline double log_gaussian_moment_factor(int k) {
  return std::lgamma(2.0 * k + 1.0) - k * std::log(2.0) - std::lgamma(k + 1.0);
}

inline double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace svlab
