#include "doctest.h"

#include <cmath>
#include <vector>

#include "svlab/error.hpp"
#include "svlab/moments.hpp"

using namespace svlab;

namespace {

std::vector<double> grid_to(double t_max, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = t_max * i / double(n - 1);
  return g;
}

ModelSpec with(const char* name, double a, double sigma, double g) {
  ModelSpec s = preset(name);
  s.a = a;
  s.sigma = sigma;
  s.g = g;
  return s;
}

}  // namespace

TEST_CASE("stein-stein mu01 relaxation hits the displayed solution") {
  const auto spec = with("stein-stein", 1.0, 1.0, 0.5);
  const auto tr = evolve_moments(spec, 0, 2, {0.0, std::log(2.0)}, MomentTable::point(0.0, 0.0));
  CHECK(tr.value(0, 1, 1) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("stein-stein mu01 and mu02 match the exponential-relaxation formulas") {
  const double a = 1.3, sigma = 0.8, g = 0.6, s0 = 0.3;
  const auto spec = with("stein-stein", a, sigma, g);
  const auto grid = grid_to(10.0, 101);
  const auto tr = evolve_moments(spec, 0, 2, grid, MomentTable::point(0.0, s0));
  const double m2inf = sigma * sigma + g * g / (2 * a);
  double worst = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    const double mu1 = sigma + (s0 - sigma) * std::exp(-a * t);
    const double mu2 = m2inf + (s0 * s0 - m2inf) * std::exp(-2 * a * t) +
                       2 * sigma * (s0 - sigma) * (std::exp(-a * t) - std::exp(-2 * a * t));
    worst = std::max({worst, std::abs(tr.value(0, 1, k) - mu1), std::abs(tr.value(0, 2, k) - mu2)});
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("heston mu20 grows linearly from the equilibrium start") {
  const auto spec = with("heston", 1.0, 1.0, 0.5);
  const auto grid = grid_to(10.0, 51);
  const auto tr = evolve_moments(spec, 2, 2, grid, MomentTable::point(0.0, spec.sigma));
  for (std::size_t k = 0; k < grid.size(); ++k)
    CHECK(tr.value(2, 0, k) == doctest::Approx(spec.sigma * grid[k]).epsilon(1e-9));
}

TEST_CASE("heston mu20 with an off-equilibrium start matches the displayed transient") {
  const double a = 0.7, sigma = 1.2, g = 0.5, s0 = 0.4;
  const auto spec = with("heston", a, sigma, g);
  const auto grid = grid_to(12.0, 61);
  const auto tr = evolve_moments(spec, 2, 2, grid, MomentTable::point(0.0, s0));
  double worst = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    const double exact = sigma * t + (s0 - sigma) / a * (1.0 - std::exp(-a * t));
    worst = std::max(worst, std::abs(tr.value(2, 0, k) - exact));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("garch mu02 matches its displayed two-rate transient") {
  const double a = 1.0, sigma = 1.0, g = 0.5, s0 = 0.5;
  const auto spec = with("garch", a, sigma, g);
  const double g2 = g * g;
  const auto grid = grid_to(8.0, 81);
  const auto tr = evolve_moments(spec, 0, 2, grid, MomentTable::point(0.0, s0));
  const double m2inf = 2 * a * sigma * sigma / (2 * a - g2);
  double worst = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    const double exact = m2inf + (s0 * s0 - m2inf) * std::exp(-(2 * a - g2) * t) +
                         2 * a * sigma * (s0 - sigma) / (a - g2) * std::exp(-a * t) *
                             (1.0 - std::exp(-(a - g2) * t));
    worst = std::max(worst, std::abs(tr.value(0, 2, k) - exact));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("odd price moments stay identically zero from x0 = 0") {
  const auto spec = with("heston", 1.0, 1.0, 0.5);
  const auto tr = evolve_moments(spec, 3, 2, grid_to(5.0, 11), MomentTable::point(0.0, 1.0));
  for (std::size_t k = 0; k < tr.t.size(); ++k) {
    CHECK(tr.value(1, 0, k) == 0.0);
    CHECK(tr.value(3, 1, k) == 0.0);
  }
  CHECK(tr.value(0, 0, 5) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("non-closing chains are rejected") {
  CHECK_THROWS_WITH_AS(
      evolve_moments(with("geometric-ou", 1, 1, 0.5), 2, 2, {0.0, 1.0}, MomentTable::point(0, 1)),
      doctest::Contains("ChainDoesNotClose"), Error);
  CHECK_THROWS_WITH_AS(
      evolve_moments(with("three-halves", 1, 1, 0.5), 2, 2, {0.0, 1.0}, MomentTable::point(0, 1)),
      doctest::Contains("ChainDoesNotClose"), Error);
  ModelSpec eo = ModelSpec::expou(1, 0, 0.5);
  CHECK_THROWS_WITH_AS(evolve_moments(eo, 2, 2, {0.0, 1.0}, MomentTable::point(0, 0)),
                       doctest::Contains("ChainDoesNotClose"), Error);
}

TEST_CASE("garch divergence pattern and overflow guard") {
  const auto spec = with("garch", 1.0, 1.0, 1.0);  // 1 + 2a/g^2 = 3
  const auto tr = evolve_moments(spec, 0, 4, grid_to(40.0, 41), MomentTable::point(0.0, 1.0));
  CHECK(tr.at(0, 1).status == MomentStatus::Finite);
  CHECK(tr.at(0, 2).status == MomentStatus::Finite);
  CHECK(tr.at(0, 3).status == MomentStatus::Divergent);  // boundary rate 0, linear growth
  CHECK(tr.at(0, 4).status == MomentStatus::Divergent);  // positive rate
  // the rate-4 moment must eventually trip the overflow guard and go NaN
  CHECK(std::isnan(tr.at(0, 4).values.back()));
  // finite ones stay finite and near their stationary values
  CHECK(tr.value(0, 2, 40) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("stationary volatility moments, all closed forms") {
  // beta = 0: Gaussian around sigma
  CHECK(stationary_s_moment(with("stein-stein", 1.0, 1.0, std::sqrt(2.0)), 2).value ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(stationary_s_moment(with("ou", 2.0, 0.7, 0.4), 1).value == doctest::Approx(0.7));
  // beta = 0, n = 4 against the direct Gaussian expansion
  {
    const double sig = 1.3, a = 0.9, g = 0.7, v = g * g / (2 * a);
    const double exact = std::pow(sig, 4) + 6 * sig * sig * v + 3 * v * v;
    CHECK(stationary_s_moment(with("ou", a, sig, g), 4).value ==
          doctest::Approx(exact).epsilon(1e-12));
  }
  // beta = 1/2: Gamma ratio; n = 1 collapses to sigma for any parameters
  CHECK(stationary_s_moment(with("heston", 1.7, 0.6, 0.9), 1).value ==
        doctest::Approx(0.6).epsilon(1e-12));
  {
    const double a = 1.0, sig = 1.0, g = 0.5, z = 2 * a * sig / (g * g);
    const double m2 = std::pow(g * g / (2 * a), 2) * z * (z + 1);
    CHECK(stationary_s_moment(with("heston", a, sig, g), 2).value ==
          doctest::Approx(m2).epsilon(1e-12));
  }
  // beta = 1: product form with divergence threshold
  CHECK(stationary_s_moment(with("garch", 1, 1, 1), 2).value == doctest::Approx(2.0));
  CHECK(stationary_s_moment(with("garch", 1, 1, 1), 3).status == MomentStatus::Divergent);
  CHECK(stationary_s_moment(with("garch", 1, 1, 1), 2).status == MomentStatus::Finite);
  // expou: Gaussian moments of S itself
  {
    const ModelSpec eo = ModelSpec::expou(1.0, 0.3, 0.8);
    const double v = 0.8 * 0.8 / 2.0;
    CHECK(stationary_s_moment(eo, 1).value == 0.0);
    CHECK(stationary_s_moment(eo, 2).value == doctest::Approx(v).epsilon(1e-12));
    CHECK(stationary_s_moment(eo, 4).value == doctest::Approx(3 * v * v).epsilon(1e-12));
  }
}

TEST_CASE("long-time limits") {
  CHECK(longtime_limit(with("heston", 1.3, 0.9, 0.4), 1, 0).value ==
        doctest::Approx(0.9).epsilon(1e-12));
  CHECK(longtime_limit(with("stein-stein", 1.0, 1.0, std::sqrt(2.0)), 2, 0).value ==
        doctest::Approx(12.0).epsilon(1e-12));
  // ou: D = sigma
  CHECK(longtime_limit(with("ou", 1.0, 0.5, 0.3), 2, 0).value ==
        doctest::Approx(3 * 0.25).epsilon(1e-12));
  // garch: finite iff l + n < 1 + 2a/g^2
  CHECK(longtime_limit(with("garch", 1, 1, 1), 2, 0).status == MomentStatus::Finite);
  CHECK(longtime_limit(with("garch", 1, 1, 1), 2, 0).value == doctest::Approx(3.0));
  CHECK(longtime_limit(with("garch", 1, 1, 1), 3, 0).status == MomentStatus::Divergent);
  CHECK(longtime_limit(with("garch", 1, 1, 1), 1, 2).status == MomentStatus::Divergent);
  CHECK(longtime_limit(with("garch", 1, 1, 1), 1, 1).value == doctest::Approx(1.0));
  // expou: variance rate exp(2 sigma + g^2/a)
  {
    const ModelSpec eo = ModelSpec::expou(1.0, 0.5, 0.6);
    CHECK(longtime_limit(eo, 1, 0).value ==
          doctest::Approx(std::exp(2 * 0.5 + 0.36)).epsilon(1e-12));
    CHECK(longtime_limit(eo, 0, 3).value == 0.0);
  }
}

TEST_CASE("trajectories relax onto the closed-form stationary values") {
  for (const char* name : {"stein-stein", "ou", "heston", "garch"}) {
    const auto spec = with(name, 1.0, 1.0, 0.5);
    const auto tr =
        evolve_moments(spec, 0, 4, {0.0, 20.0}, MomentTable::point(0.0, 0.5 * spec.sigma));
    for (int n = 1; n <= 4; ++n) {
      const MomentValue mv = stationary_s_moment(spec, n);
      if (!mv.finite() || tr.at(0, n).status != MomentStatus::Finite) continue;
      CHECK(tr.value(0, n, 1) ==
            doctest::Approx(mv.value).epsilon(1e-6));
    }
  }
}

TEST_CASE("rescaled price moments converge to the long-time limits") {
  // The transients decay as c/t. Pure price moments (n = 0) reach 1% by
  // t = 50/a; the mixed indices carry constants c of order one and need a
  // proportionally longer horizon, so they are checked at t = 400/a together
  // with the 1/t scaling itself.
  for (const char* name : {"stein-stein", "ou", "heston"}) {
    const auto spec = with(name, 1.0, 1.0, 0.5);
    const auto tr =
        evolve_moments(spec, 4, 2, {0.0, 50.0, 100.0, 400.0}, MomentTable::point(0.0, spec.sigma));
    for (int l = 1; l <= 2; ++l)
      for (int n = 0; n <= 2; ++n) {
        const MomentValue lim = longtime_limit(spec, l, n);
        if (!lim.finite()) continue;
        const double d50 = tr.value(2 * l, n, 1) / std::pow(50.0, l) / lim.value - 1.0;
        const double d100 = tr.value(2 * l, n, 2) / std::pow(100.0, l) / lim.value - 1.0;
        const double d400 = tr.value(2 * l, n, 3) / std::pow(400.0, l) / lim.value - 1.0;
        if (l == 1 && n == 0) CHECK(std::abs(d50) < 0.01);
        CHECK(std::abs(d400) < 0.01);
        if (std::abs(d50) > 1e-4) CHECK(std::abs(d100 / d50 - 0.5) < 0.15);
      }
  }
  // garch converges at the same 1/t speed but with a larger constant
  {
    const auto spec = with("garch", 1.0, 1.0, 1.0);
    const auto tr =
        evolve_moments(spec, 4, 0, {0.0, 50.0, 100.0, 400.0}, MomentTable::point(0.0, 1.0));
    const double lim = longtime_limit(spec, 2, 0).value;
    const double d50 = tr.value(4, 0, 1) / std::pow(50.0, 2) / lim - 1.0;
    const double d100 = tr.value(4, 0, 2) / std::pow(100.0, 2) / lim - 1.0;
    const double d400 = tr.value(4, 0, 3) / std::pow(400.0, 2) / lim - 1.0;
    CHECK(std::abs(d100 / d50 - 0.5) < 0.1);  // 1/t transient
    CHECK(std::abs(d400) < 0.01);
  }
}

TEST_CASE("gaussian kurtosis ratio at long times") {
  const auto spec = with("heston", 1.0, 1.0, 0.5);
  const auto tr = evolve_moments(spec, 4, 2, {0.0, 50.0}, MomentTable::point(0.0, 1.0));
  const double ratio =
      tr.value(4, 0, 1) / (3.0 * tr.value(2, 0, 1) * tr.value(2, 0, 1));
  CHECK(ratio > 0.98);
  CHECK(ratio < 1.02);
}

TEST_CASE("garch tail exponent") {
  CHECK(garch_tail_exponent(with("garch", 1, 1, 1)) == doctest::Approx(7.0));
  CHECK(garch_tail_exponent(with("garch", 1, 1, 2)) == doctest::Approx(4.0));
  CHECK(garch_tail_exponent(with("garch", 1e-9, 1, 1)) == doctest::Approx(3.0).epsilon(1e-6));
  CHECK_THROWS_WITH_AS(garch_tail_exponent(with("heston", 1, 1, 1)),
                       doctest::Contains("NotGarch"), Error);
}

TEST_CASE("v = 1 autocorrelation proxy") {
  const auto ss = with("stein-stein", 1.0, 1.0, std::sqrt(2.0));
  CHECK(acf_proxy_v1(ss, 1, 0.0) == doctest::Approx(2.0).epsilon(1e-12));  // mu2 at dt = 0
  CHECK(acf_proxy_v1(ss, 1, 1.0) == doctest::Approx(1.0 + std::exp(-1.0)).epsilon(1e-12));
  CHECK(acf_proxy_v1(ss, 1, 60.0) == doctest::Approx(1.0).epsilon(1e-10));  // decorrelated
  CHECK_THROWS_WITH_AS(acf_proxy_v1(with("garch", 1, 1, 1), 2, 1.0),
                       doctest::Contains("DivergentMoment"), Error);
}
