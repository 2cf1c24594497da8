#include "svlab/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "svlab/error.hpp"

namespace svlab {

std::size_t hill_default_k(std::size_t n) {
  const auto k = static_cast<std::size_t>(std::pow(double(n), 0.6));
  return std::clamp<std::size_t>(k, 50, std::max<std::size_t>(n / 10, 50));
}

TailReport hill_estimator(const std::vector<double>& samples, std::size_t k) {
  if (k < 50) fail(Errc::InsufficientTail, "need k >= 50 upper order statistics");
  if (k > samples.size() / 10)
    fail(Errc::InsufficientTail, "k must not exceed a tenth of the sample");

  std::vector<double> mag(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) mag[i] = std::abs(samples[i]);
  std::nth_element(mag.begin(), mag.begin() + k, mag.end(), std::greater<double>());
  std::sort(mag.begin(), mag.begin() + k + 1, std::greater<double>());

  const double x_k1 = mag[k];
  if (!(x_k1 > 0)) fail(Errc::DegenerateSample, "threshold order statistic is zero");
  double acc = 0;
  for (std::size_t i = 0; i < k; ++i) acc += std::log(mag[i] / x_k1);
  if (!(acc > 0)) fail(Errc::DegenerateSample, "upper order statistics are all equal");

  TailReport rep;
  rep.k = k;
  rep.threshold = x_k1;
  rep.index = double(k) / acc;
  rep.stderr = rep.index / std::sqrt(double(k));
  return rep;
}

MomentEstimate empirical_moment(const std::vector<double>& samples, int order) {
  if (samples.empty()) fail(Errc::EmptySample, "no samples");
  if (order < 1) fail(Errc::EmptySample, "order must be >= 1");
  double s1 = 0, s2 = 0;
  for (double x : samples) {
    const double p = std::pow(x, order);
    s1 += p;
    s2 += p * p;
  }
  const double n = double(samples.size());
  MomentEstimate est;
  est.mean = s1 / n;
  const double var = std::max(0.0, s2 / n - est.mean * est.mean);
  est.stderr = samples.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  return est;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) fail(Errc::EmptySample, "no samples");
  std::sort(samples.begin(), samples.end());
  const double n = double(samples.size());
  double d = 0;
  double prev_f = -1e-12;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    if (f < prev_f - 1e-9) fail(Errc::NonMonotoneCdf, "reference CDF decreases on the sample");
    prev_f = std::max(prev_f, f);
    d = std::max(d, std::abs(double(i + 1) / n - f));
    d = std::max(d, std::abs(double(i) / n - f));
  }
  return d;
}

}  // namespace svlab
