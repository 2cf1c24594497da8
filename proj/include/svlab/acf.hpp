#pragma once

#include <vector>

#include "svlab/model.hpp"
#include "svlab/sde.hpp"

namespace svlab {

enum class AcfSource { Analytic, Empirical };

// Stationary autocorrelation C_{u,v}(dt) = < S_t^u S_{t+dt}^v >.
struct AcfCurve {
  int u = 0, v = 0;
  AcfSource source = AcfSource::Analytic;
  std::vector<double> lags;
  std::vector<double> values;
  std::vector<double> stderrs;  // jackknife (zero for analytic curves)
  double asymptote = 0;         // C(inf) = sigma-weighted decorrelation level
};

// Closed-form stationary autocorrelation. v = 1 is the universal two-term
// exponential; for v > 1 (beta = 0 or 1/2) the nested chain
// d/dt C_{u,v'} = -v' a C_{u,v'} + [v' a sigma + ...] C_{u,v'-1} + ...
// is solved exactly as a combination of exponentials e^{-l a dt} whose
// coefficients are fixed by the equal-time conditions C_{u,v'}(0) =
// mu_{0,u+v'}(inf) for v' = 0..v (triangular eigen-solve).
AcfCurve analytic_acf(const ModelSpec& spec, int u, int v, const std::vector<double>& lags);

// Time-and-ensemble average over the stationary segment with jackknife
// standard errors (leave-one-path-out).
AcfCurve empirical_acf(const PathEnsemble& ens, int u, int v, const std::vector<double>& lags,
                       double burn_in);

struct DecayFit {
  double rate = 0;
  double stderr = 0;
};

// Least-squares slope of ln(C(dt) - C(inf)) vs dt on [lag_min, lag_max].
DecayFit fit_decay_rate(const AcfCurve& curve, double lag_min, double lag_max);

}  // namespace svlab
