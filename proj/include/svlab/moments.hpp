#pragma once

#include <map>
#include <vector>

#include "svlab/model.hpp"

namespace svlab {

// Index of the mixed moment mu_{m,n}(t) = < X^m S^n >.
struct MomentIndex {
  int m = 0;  // price power
  int n = 0;  // volatility power
  friend bool operator<(const MomentIndex& a, const MomentIndex& b) {
    return a.m != b.m ? a.m < b.m : a.n < b.n;
  }
  friend bool operator==(const MomentIndex& a, const MomentIndex& b) {
    return a.m == b.m && a.n == b.n;
  }
};

enum class MomentStatus { Finite, Divergent };

struct MomentValue {
  MomentStatus status = MomentStatus::Finite;
  double value = 0;
  bool finite() const { return status == MomentStatus::Finite; }
};

// Initial moments. The common case is a point initial condition
// (X_0, S_0) = (x0, s0); individual indices can be overridden.
struct MomentTable {
  double x0 = 0;
  double s0 = 0;
  std::map<MomentIndex, double> overrides;

  static MomentTable point(double x0, double s0) {
    MomentTable t;
    t.x0 = x0;
    t.s0 = s0;
    return t;
  }
  MomentTable& set(int m, int n, double v) {
    overrides[{m, n}] = v;
    return *this;
  }
  double initial(int m, int n) const;
};

struct MomentSeries {
  MomentIndex index;
  MomentStatus status = MomentStatus::Finite;
  std::vector<double> values;  // NaN after the overflow guard has tripped
};

struct MomentTrajectory {
  std::vector<double> t;
  std::vector<MomentSeries> series;
  const MomentSeries& at(int m, int n) const;
  double value(int m, int n, std::size_t k) const { return at(m, n).values[k]; }
};

// Integrates the closed moment chain d/dt mu_{m,n} =
//   n a (sigma mu_{m,n-1} - mu_{m,n}) + m(m-1)/2 mu_{m-2,n+2gamma}
//   + g^2/2 n(n-1) mu_{m,n-2+2beta}
// exactly (the system is linear with constant coefficients and lower
// triangular once indices are ordered by (m, n); each grid step applies the
// matrix exponential of the generator). Requires alpha = 0, 2 beta in
// {0,1,2}, 2 gamma in {1,2}; otherwise the chain does not close on integer
// indices and ChainDoesNotClose is thrown.
MomentTrajectory evolve_moments(const ModelSpec& spec, int max_m, int max_n,
                                const std::vector<double>& t_grid, const MomentTable& initial);

// Stationary volatility moment mu_{0,n}(infinity) in closed form.
//   beta = 0  : Gaussian moments around sigma with variance g^2/(2a)
//   beta = 1/2: (g^2/2a)^n Gamma(z+n)/Gamma(z), z = 2 a sigma / g^2
//   beta = 1  : sigma^n prod_{j=1}^{n-1} (1 - j g^2/2a)^{-1}, divergent for
//               n >= 1 + 2a/g^2
//   ExpOU     : Gaussian moments of S itself (mean 0, variance g^2/(2a))
MomentValue stationary_s_moment(const ModelSpec& spec, int n);

// Long-time limit of t^{-l} mu_{2l,n}(t).
MomentValue longtime_limit(const ModelSpec& spec, int l, int n);

// Return-distribution tail exponent tau = 3 + 4a/g^2 of the (0,1,1/2) model.
double garch_tail_exponent(const ModelSpec& spec);

// Stationary volatility autocorrelation proxy with v = 1:
// C_{u,1}(dt) = sigma mu_u + (mu_{u+1} - sigma mu_u) e^{-a dt}.
double acf_proxy_v1(const ModelSpec& spec, int u, double delta_t);

}  // namespace svlab
