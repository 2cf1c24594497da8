#pragma once

#include <functional>

namespace svlab {

struct QuadConfig {
  double rel_tol = 1e-8;
  int max_intervals = 4000;
  int grid_points = 2048;  // density-curve resolution
};

// Adaptive Gauss-Kronrod (G7/K15) on a finite interval. Throws
// QuadratureFailure when the interval budget is exhausted before the
// tolerance is reached.
double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double rel_tol = 1e-10, int max_intervals = 4000);

struct LogIntegral {
  double log_value;   // log of the integral
  double peak_u;      // maximizer of the log-integrand
  double peak_value;  // log-integrand at the peak
  double cut_lo, cut_hi;  // integration window (log-integrand > peak - drop)
};

// Integral of exp(logf(u)) du over the real line, evaluated in log space so
// that integrands with astronomically small absolute scale stay exact in
// relative terms. `hint` must point somewhere within reach of the peak; the
// routine brackets the maximum, rescales by it, cuts where the integrand has
// dropped by ~e^-75 and applies adaptive Gauss-Kronrod on the window.
LogIntegral integrate_log(const std::function<double(double)>& logf, double hint,
                          const QuadConfig& cfg = {});

// Safeguarded 1-D minimization (golden section with parabolic steps) of a
// smooth unimodal function on [a, b] to relative tolerance `tol`.
double minimize_scalar(const std::function<double(double)>& f, double a, double b,
                       double tol = 1e-13);

}  // namespace svlab
