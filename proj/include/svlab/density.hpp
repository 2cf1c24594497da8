#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "svlab/model.hpp"
#include "svlab/quadrature.hpp"

namespace svlab {

// log of the unnormalized stationary volatility density (the zero-current
// Fokker-Planck solution), branch selected by the family class:
//   generic     : -2b ln s - (2a/g^2) s^d2/d2 + (2as/g^2) s^d1/d1
//   heston-type : (-2b + 2 a sigma/g^2) ln s - (2a/g^2) s
//   garch-type  : (-2b - 2a/g^2) ln s - (2 a sigma/g^2)/s
//   expou       : Gaussian in s with variance g^2/(2a) (support = R)
double log_density_unnormalized(const ModelSpec& spec, double s);

// Analytic normalizability test (quadrature cannot detect slow divergence).
bool is_normalizable(const ModelSpec& spec);

// Normalized stationary density on an adaptively refined grid. pdf/cdf are
// exact in the continuous form; sampling and the stored cdf use a
// piecewise-exponential interpolation of the grid, so inverse-CDF samples
// are distributed exactly per the stored curve.
class DensityCurve {
 public:
  ModelSpec spec;
  std::vector<double> grid;        // s values, ascending
  std::vector<double> log_values;  // log unnormalized density at grid
  double log_norm = 0;             // log of the normalization integral Z
  std::pair<double, double> support{0, 0};

  bool normalized() const { return normalized_; }
  double log_pdf(double s) const;
  double pdf(double s) const;
  double cdf(double s) const;
  double quantile(double p) const;

 private:
  friend DensityCurve normalize(const ModelSpec&, const QuadConfig&);
  bool normalized_ = false;
  bool log_axis_ = true;       // axis coordinate: ln s (algebraic) or s (expou)
  std::vector<double> w_;      // axis coordinates of the grid
  std::vector<double> cum_;    // cumulative cell masses, cum_.back() == 1
  std::vector<double> lw_;     // log of the axis-space integrand at grid
};

DensityCurve normalize(const ModelSpec& spec, const QuadConfig& cfg = {});

// log of the normalization integral Z alone (no grid construction).
double log_normalization(const ModelSpec& spec, const QuadConfig& cfg = {});

// Inverse-CDF sampling from the curve (counter-based stream, reproducible).
std::vector<double> sample_stationary(const DensityCurve& curve, std::size_t count,
                                      std::uint64_t seed);

// Quadrature of s^n P_S(s); cross-checks moment_engine's closed forms.
double stationary_moment_check(const DensityCurve& curve, int n);

}  // namespace svlab
