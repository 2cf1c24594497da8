#include "svlab/acf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "svlab/error.hpp"
#include "svlab/moments.hpp"

namespace svlab {

AcfCurve analytic_acf(const ModelSpec& spec, int u, int v, const std::vector<double>& lags) {
  validate(spec);
  if (u < 0 || v < 0) fail(Errc::UnsupportedOrder, "orders must be >= 0");
  if (!spec.alpha.is(0) || spec.kind != ModelKind::Algebraic)
    fail(Errc::UnsupportedOrder, "analytic autocorrelation needs the algebraic family, alpha = 0");
  const bool b0 = spec.beta.is(0), bh = spec.beta.is(1, 2), b1 = spec.beta.is(1);
  if (!b0 && !bh && !b1) fail(Errc::UnsupportedOrder, "2 beta must be in {0,1,2}");
  if (b1 && v > 1)
    fail(Errc::UnsupportedOrder,
         "beta = 1 with v > 1 mixes growth rates l1 a - l2 g^2/2 of both signs; only v = 1 "
         "exists in the stationary state");

  // equal-time conditions C_{u,v'}(0) = mu_{0,u+v'}(inf), v' = 0..v
  std::vector<double> mu(v + 1);
  for (int k = 0; k <= v; ++k) {
    const MomentValue m = stationary_s_moment(spec, u + k);
    if (!m.finite()) fail(Errc::DivergentMoment, "stationary moment of order " +
                                                      std::to_string(u + k) + " diverges");
    mu[k] = m.value;
  }

  AcfCurve curve;
  curve.u = u;
  curve.v = v;
  curve.source = AcfSource::Analytic;
  curve.lags = lags;
  curve.values.resize(lags.size());
  curve.stderrs.assign(lags.size(), 0.0);

  const double a = spec.a, sigma = spec.sigma, g2 = spec.g * spec.g;

  if (v == 0) {
    std::fill(curve.values.begin(), curve.values.end(), mu[0]);
    curve.asymptote = mu[0];
    return curve;
  }
  if (v == 1) {
    const double base = sigma * mu[0];
    curve.asymptote = base;
    for (std::size_t i = 0; i < lags.size(); ++i)
      curve.values[i] = base + (mu[1] - base) * std::exp(-a * lags[i]);
    return curve;
  }

  // chain matrix for (C_{u,0}, ..., C_{u,v}): lower triangular, eigenvalues -l a
  const int n = v + 1;
  std::vector<double> sub1(n, 0.0), sub2(n, 0.0);
  for (int r = 1; r < n; ++r) {
    sub1[r] = r * a * sigma + (bh ? 0.5 * g2 * r * (r - 1) : 0.0);
    sub2[r] = b0 ? 0.5 * g2 * r * (r - 1) : 0.0;
  }
  // eigenvectors by forward substitution: (M - lambda_l) r = 0 with r_l = 1
  std::vector<std::vector<double>> evec(n, std::vector<double>(n, 0.0));
  for (int l = 0; l < n; ++l) {
    evec[l][l] = 1.0;
    for (int r = l + 1; r < n; ++r) {
      double rhs = sub1[r] * evec[l][r - 1];
      if (r >= 2) rhs += sub2[r] * evec[l][r - 2];
      evec[l][r] = rhs / (a * double(r - l));  // -(M_rr - lambda_l) = a (r - l)
    }
  }
  // weights from the initial condition (triangular solve)
  std::vector<double> w(n, 0.0);
  for (int r = 0; r < n; ++r) {
    double s = mu[r];
    for (int l = 0; l < r; ++l) s -= w[l] * evec[l][r];
    w[r] = s;  // evec[r][r] = 1
  }
  curve.asymptote = w[0] * evec[0][v];
  for (std::size_t i = 0; i < lags.size(); ++i) {
    double val = 0;
    for (int l = 0; l < n; ++l) val += w[l] * evec[l][v] * std::exp(-double(l) * a * lags[i]);
    curve.values[i] = val;
  }
  return curve;
}

AcfCurve empirical_acf(const PathEnsemble& ens, int u, int v, const std::vector<double>& lags,
                       double burn_in) {
  if (u < 0 || v < 0) fail(Errc::UnsupportedOrder, "orders must be >= 0");
  if (ens.times.size() < 2) fail(Errc::InsufficientHorizon, "ensemble has no recorded steps");
  const double grid_dt = ens.times[1] - ens.times[0];

  std::size_t k0 = 0;
  while (k0 < ens.times.size() && ens.times[k0] < burn_in - 1e-12) ++k0;

  AcfCurve curve;
  curve.u = u;
  curve.v = v;
  curve.source = AcfSource::Empirical;
  curve.lags = lags;
  curve.values.resize(lags.size());
  curve.stderrs.resize(lags.size());
  curve.asymptote = std::numeric_limits<double>::quiet_NaN();

  const std::size_t n_rec = ens.times.size();
  const std::int64_t np = ens.n_paths;
  std::vector<double> psum(np), pcnt(np);

  for (std::size_t li = 0; li < lags.size(); ++li) {
    const double ratio = lags[li] / grid_dt;
    const std::int64_t k_lag = static_cast<std::int64_t>(std::llround(ratio));
    if (k_lag < 0 || std::abs(ratio - double(k_lag)) > 1e-9 * std::max(1.0, ratio))
      fail(Errc::LagNotOnGrid, "lag must be a multiple of the recorded spacing");
    if (k0 + k_lag >= n_rec) fail(Errc::InsufficientHorizon, "lag exceeds the horizon");

    double total = 0, count = 0;
    for (std::int64_t p = 0; p < np; ++p) {
      double acc = 0;
      std::size_t c = 0;
      for (std::size_t k = k0; k + k_lag < n_rec; ++k) {
        const double su = ens.s_at(p, k);
        const double sv = ens.s_at(p, k + k_lag);
        acc += std::pow(su, u) * std::pow(sv, v);
        ++c;
      }
      psum[p] = acc;
      pcnt[p] = double(c);
      total += acc;
      count += double(c);
    }
    const double mean = total / count;
    curve.values[li] = mean;
    // jackknife over paths
    double var = 0;
    for (std::int64_t p = 0; p < np; ++p) {
      const double loo = (total - psum[p]) / (count - pcnt[p]);
      var += (loo - mean) * (loo - mean);
    }
    curve.stderrs[li] = np > 1 ? std::sqrt(var * double(np - 1) / double(np)) : 0.0;
  }
  return curve;
}

DecayFit fit_decay_rate(const AcfCurve& curve, double lag_min, double lag_max) {
  if (!std::isfinite(curve.asymptote))
    fail(Errc::NonPositiveResidual, "curve has no asymptote to subtract");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < curve.lags.size(); ++i) {
    const double lag = curve.lags[i];
    if (lag < lag_min - 1e-12 || lag > lag_max + 1e-12) continue;
    const double resid = curve.values[i] - curve.asymptote;
    if (!(resid > 0))
      fail(Errc::NonPositiveResidual, "curve touches its asymptote inside the fit window");
    xs.push_back(lag);
    ys.push_back(std::log(resid));
  }
  if (xs.size() < 2) fail(Errc::NonPositiveResidual, "fewer than two usable lags in the window");

  const double n = double(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double icept = (sy - slope * sx) / n;
  double rss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (icept + slope * xs[i]);
    rss += r * r;
  }
  DecayFit fit;
  fit.rate = -slope;
  fit.stderr = xs.size() > 2 ? std::sqrt(rss / (n - 2.0) * n / denom) : 0.0;
  return fit;
}

}  // namespace svlab
