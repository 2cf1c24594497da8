#include "svlab/special.hpp"

#include <algorithm>
#include <cmath>

#include "svlab/error.hpp"
#include "svlab/quadrature.hpp"

namespace svlab {

double lambert_w0(double y) {
  const double inv_e = std::exp(-1.0);
  if (y < -inv_e) {
    if (y > -inv_e - 4e-16) return -1.0;  // representation slop at the branch point
    fail(Errc::OutOfDomain, "lambert_w0 requires y >= -1/e");
  }
  if (y == 0.0) return 0.0;

  if (y >= 0.5) {
    // solve w + ln w = ln y. The left side is increasing and concave on
    // (0, inf), so Newton converges monotonically from any positive start
    // and never touches e^w (no overflow anywhere in the domain).
    const double ly = std::log(y);
    double w = ly > 1.0 ? ly : 1.0;
    for (int it = 0; it < 100; ++it) {
      const double h = w + std::log(w) - ly;
      const double step = h / (1.0 + 1.0 / w);
      w -= step;
      if (std::abs(step) <= 1e-16 * (1.0 + std::abs(w))) break;
    }
    return w;
  }

  // near and below the origin: bracketed Halley on w e^w - y, seeded by the
  // branch-point series; w stays in [-1, 0.4], far from overflow
  double w;
  if (y < -0.32) {
    const double p = std::sqrt(std::max(0.0, 2.0 * (std::exp(1.0) * y + 1.0)));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else {
    w = y * (1.0 - y * (1.0 - 1.5 * y));
  }
  double lo = -1.0, hi = 0.4;
  for (int it = 0; it < 60; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - y;
    if (f > 0)
      hi = std::min(hi, w);
    else
      lo = std::max(lo, w);
    const double d1 = ew * (w + 1.0);
    const double halley_den = d1 - f * (w + 2.0) / (2.0 * (w + 1.0) + 1e-300);
    double next = halley_den != 0.0 ? w - f / halley_den : 0.5 * (lo + hi);
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - w) <= 1e-16 * (1.0 + std::abs(w))) {
      w = next;
      break;
    }
    w = next;
  }
  return w;
}

double log_bessel_k(double nu, double z) {
  if (!(z > 0) || nu < 0) fail(Errc::OutOfDomain, "log_bessel_k requires z > 0, nu >= 0");
  // K_nu(z) = 1/2 Integral over R of exp(-z cosh t) cosh(nu t) dt (even extension)
  auto logf = [&](double t) {
    const double a = std::abs(nu * t);
    const double log_cosh = a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
    return -z * std::cosh(t) + log_cosh;
  };
  const double hint = std::asinh(nu / z);
  QuadConfig cfg;
  cfg.rel_tol = 1e-10;
  const LogIntegral I = integrate_log(logf, hint, cfg);
  return I.log_value - std::log(2.0);
}

}  // namespace svlab
