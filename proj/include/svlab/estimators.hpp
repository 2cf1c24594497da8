#pragma once

#include <functional>
#include <vector>

namespace svlab {

// Hill estimate of the survival-function tail index from the k largest
// absolute order statistics. A density tail |x|^-tau corresponds to index
// tau - 1.
struct TailReport {
  double index = 0;
  double stderr = 0;  // index / sqrt(k)
  std::size_t k = 0;
  double threshold = 0;  // the (k+1)-th largest |value|
};

TailReport hill_estimator(const std::vector<double>& samples, std::size_t k);

// Default k = floor(n^0.6) clipped to [50, n/10].
std::size_t hill_default_k(std::size_t n);

struct MomentEstimate {
  double mean = 0;
  double stderr = 0;
};

MomentEstimate empirical_moment(const std::vector<double>& samples, int order);

// Sup-norm distance between the empirical CDF and a reference CDF.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

}  // namespace svlab
