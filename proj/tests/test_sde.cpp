#include "doctest.h"

#include <cmath>

#include "svlab/error.hpp"
#include "svlab/moments.hpp"
#include "svlab/sde.hpp"

using namespace svlab;

namespace {

ModelSpec with(const char* name, double a, double sigma, double g) {
  ModelSpec s = preset(name);
  s.a = a;
  s.sigma = sigma;
  s.g = g;
  return s;
}

}  // namespace

TEST_CASE("single euler step, hand-evaluated") {
  const auto ss = with("stein-stein", 1.0, 1.0, 0.5);
  const State out = step({0.3, 1.2}, ss, 0.01, {0.7, -1.0});
  CHECK(out.s == doctest::Approx(1.148).epsilon(1e-14));
  CHECK(out.x == doctest::Approx(0.3 + 1.2 * 0.1 * 0.7).epsilon(1e-14));
}

TEST_CASE("zero-noise drift fixed point") {
  auto ou = with("ou", 1.0, 1.0, 0.0);
  const State out = step({0.0, 1.0}, ou, 0.01, {1.3, -2.1});
  CHECK(out.s == 1.0);
  CHECK(out.x == doctest::Approx(0.0 + std::sqrt(1.0) * 0.1 * 1.3));
}

TEST_CASE("multiplicative noise vanishes at the origin for beta = 1") {
  // at S = 0 the noise channel is dead: the update is drift-only, and with
  // sigma = 0 the origin is an exact fixed point
  const auto garch = with("garch", 1.0, 1.0, 1.0);
  const State a = step({0.0, 0.0}, garch, 0.01, {0.5, 5.0});
  const State b = step({0.0, 0.0}, garch, 0.01, {0.5, -7.0});
  CHECK(a.s == b.s);
  CHECK(a.s == doctest::Approx(garch.a * garch.sigma * 0.01));
  const auto absorbing = with("garch", 1.0, 0.0, 1.0);
  const State c = step({0.0, 0.0}, absorbing, 0.01, {0.5, 5.0});
  CHECK(c.s == 0.0);
}

TEST_CASE("deterministic volatility path stays at sigma when g = 0") {
  auto spec = with("ou", 1.0, 1.0, 0.0);
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 5.0;
  cfg.n_paths = 1;
  cfg.seed = 3;
  const PathEnsemble ens = simulate_paths(spec, cfg);
  for (std::size_t k = 0; k < ens.times.size(); ++k)
    CHECK(ens.s_at(0, k) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("ensembles are bit-identical for any thread count") {
  const auto spec = with("heston", 1.0, 1.0, 0.5);
  SimConfig cfg;
  cfg.dt = 0.005;
  cfg.t_end = 2.0;
  cfg.n_paths = 37;
  cfg.seed = 11;
  const PathEnsemble e1 = simulate_paths(spec, cfg, 1);
  const PathEnsemble e2 = simulate_paths(spec, cfg, 2);
  const PathEnsemble e3 = simulate_paths(spec, cfg, 5);
  CHECK(e1.x == e2.x);
  CHECK(e1.s == e2.s);
  CHECK(e1.x == e3.x);
  CHECK(e1.s == e3.s);
}

TEST_CASE("reflection keeps the volatility non-negative") {
  const auto spec = with("ou", 1.0, 0.2, 1.0);  // deep in the reflecting regime
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 20.0;
  cfg.n_paths = 50;
  cfg.seed = 5;
  const PathEnsemble ens = simulate_paths(spec, cfg);
  double min_s = 1e9;
  for (double v : ens.s) min_s = std::min(min_s, v);
  CHECK(min_s >= 0.0);
}

TEST_CASE("one-step transition law of the beta = 0 volatility") {
  // Exact law: Gaussian, mean sigma + (s0 - sigma) e^{-a dt},
  // variance g^2 (1 - e^{-2 a dt}) / (2a). Euler matches to O(dt^2) / O(dt).
  const double a = 1.0, sigma = 2.0, g = 0.5, s0 = 3.0, dt = 0.01;
  const auto spec = with("ou", a, sigma, g);
  SimConfig cfg;
  cfg.dt = dt;
  cfg.t_end = 2 * dt;  // only the first step is inspected
  cfg.n_paths = 200000;
  cfg.seed = 17;
  cfg.initial_s = s0;
  const PathEnsemble ens = simulate_paths(spec, cfg);
  double m1 = 0, m2 = 0;
  for (std::int64_t p = 0; p < cfg.n_paths; ++p) {
    const double s = ens.s_at(p, 1);
    m1 += s;
    m2 += s * s;
  }
  m1 /= double(cfg.n_paths);
  m2 = m2 / double(cfg.n_paths) - m1 * m1;
  const double exact_mean = sigma + (s0 - sigma) * std::exp(-a * dt);
  const double exact_var = g * g * (1.0 - std::exp(-2 * a * dt)) / (2 * a);
  const double se_mean = g * std::sqrt(dt) / std::sqrt(double(cfg.n_paths));
  CHECK(std::abs(m1 - exact_mean) < 3 * se_mean + 2 * a * a * dt * dt * std::abs(s0 - sigma));
  CHECK(std::abs(m2 / exact_var - 1.0) < 3 * std::sqrt(2.0 / double(cfg.n_paths)) + 1.5 * a * dt);
}

TEST_CASE("halving the step leaves stationary estimates within noise") {
  const auto spec = with("ou", 1.0, 2.0, 0.4);
  auto run = [&](double dt) {
    SimConfig cfg;
    cfg.dt = dt;
    cfg.t_end = 30.0;
    cfg.n_paths = 400;
    cfg.seed = 23;
    cfg.record_stride = std::max<std::int64_t>(1, std::llround(0.5 / dt));
    const PathEnsemble ens = simulate_paths(spec, cfg, 2);
    return ensemble_stats(ens, 10.0);
  };
  const EnsembleStats c = run(2e-3);
  const EnsembleStats f = run(1e-3);
  const double se = std::sqrt(c.stderr_s * c.stderr_s + f.stderr_s * f.stderr_s);
  CHECK(std::abs(c.mean_s - f.mean_s) < 3 * se);
  const double se2 = std::sqrt(c.stderr_s2 * c.stderr_s2 + f.stderr_s2 * f.stderr_s2);
  CHECK(std::abs(c.mean_s2 - f.mean_s2) < 3 * se2);
}

TEST_CASE("ensemble moments track the moment chain (mc cross-check)") {
  const auto spec = with("stein-stein", 1.0, 2.0, 0.5);  // sigma high: no boundary bias
  SimConfig cfg;
  cfg.dt = 2e-3;
  cfg.t_end = 8.0;
  cfg.n_paths = 4000;
  cfg.seed = 31;
  cfg.record_stride = 250;  // every 0.5 time units
  cfg.initial_s = spec.sigma;
  const PathEnsemble ens = simulate_paths(spec, cfg, 2);
  const auto tr = evolve_moments(spec, 2, 2, ens.times, MomentTable::point(0.0, spec.sigma));
  for (std::size_t k = 4; k < ens.times.size(); k += 4) {
    double s1 = 0, s2 = 0, x2 = 0, s1v = 0, s2v = 0, x2v = 0;
    for (std::int64_t p = 0; p < cfg.n_paths; ++p) {
      const double s = ens.s_at(p, k), x = ens.x_at(p, k);
      s1 += s;
      s2 += s * s;
      x2 += x * x;
    }
    const double n = double(cfg.n_paths);
    s1 /= n;
    s2 /= n;
    x2 /= n;
    for (std::int64_t p = 0; p < cfg.n_paths; ++p) {
      const double s = ens.s_at(p, k), x = ens.x_at(p, k);
      s1v += (s - s1) * (s - s1);
      s2v += (s * s - s2) * (s * s - s2);
      x2v += (x * x - x2) * (x * x - x2);
    }
    const double se1 = std::sqrt(s1v / (n - 1) / n);
    const double se2 = std::sqrt(s2v / (n - 1) / n);
    const double se3 = std::sqrt(x2v / (n - 1) / n);
    CHECK(std::abs(s1 - tr.value(0, 1, k)) < 3.5 * se1 + 1e-3);
    CHECK(std::abs(s2 - tr.value(0, 2, k)) < 3.5 * se2 + 2e-3);
    CHECK(std::abs(x2 - tr.value(2, 0, k)) < 3.5 * se3 + 2e-3);
  }
}

TEST_CASE("return extraction") {
  // gamma = 1/2, deterministic unit volatility: pure Brownian increments
  auto spec = with("ou", 1.0, 1.0, 0.0);
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 30.0;
  cfg.n_paths = 500;
  cfg.seed = 41;
  cfg.record_stride = 10;  // grid spacing 0.1
  const PathEnsemble ens = simulate_paths(spec, cfg, 2);

  CHECK_THROWS_WITH_AS(extract_returns(ens, 0.15, 6.0), doctest::Contains("LagNotOnGrid"), Error);
  CHECK_THROWS_WITH_AS(extract_returns(ens, 1.0, 1.0), doctest::Contains("InvalidConfig"), Error);
  CHECK_THROWS_WITH_AS(extract_returns(ens, 100.0, 6.0),
                       doctest::Contains("InsufficientHorizon"), Error);

  const ReturnSample rs = extract_returns(ens, 1.0, 6.0);
  CHECK(rs.delta_t == doctest::Approx(1.0));
  double v = 0, m = 0;
  for (double r : rs.values) m += r;
  m /= double(rs.values.size());
  for (double r : rs.values) v += (r - m) * (r - m);
  v /= double(rs.values.size() - 1);
  const double se = std::sqrt(2.0 / double(rs.values.size()));
  CHECK(std::abs(v / rs.delta_t - 1.0) < 3 * se);
}

TEST_CASE("heston long-lag return variance matches sigma delta_t") {
  const auto spec = with("heston", 1.0, 1.0, 0.5);
  SimConfig cfg;
  cfg.dt = 2e-3;
  cfg.t_end = 50.0;
  cfg.n_paths = 800;
  cfg.seed = 47;
  cfg.record_stride = 500;  // grid spacing 1.0
  const PathEnsemble ens = simulate_paths(spec, cfg, 2);
  const ReturnSample rs = extract_returns(ens, 20.0, 10.0);
  double m = 0, v = 0;
  for (double r : rs.values) m += r;
  m /= double(rs.values.size());
  for (double r : rs.values) v += (r - m) * (r - m);
  v /= double(rs.values.size() - 1);
  const double se = std::sqrt(2.0 / double(rs.values.size()));
  CHECK(std::abs(v / rs.delta_t - spec.sigma) < 3 * se + 0.1 / rs.delta_t);
}

TEST_CASE("expou defaults and variance growth") {
  const ModelSpec eo = ModelSpec::expou(1.0, 0.2, 0.4);
  SimConfig cfg;
  cfg.dt = 5e-3;
  cfg.t_end = 30.0;
  cfg.n_paths = 4000;
  cfg.seed = 53;
  cfg.record_stride = 1000;
  const PathEnsemble ens = simulate_paths(eo, cfg, 2);
  CHECK(ens.s_at(0, 0) == 0.0);  // expou starts the log-volatility at zero
  const EnsembleStats st = ensemble_stats(ens, 10.0);
  const double rate = std::exp(2 * eo.sigma + eo.g * eo.g / eo.a);
  CHECK(std::abs(st.final_var_x / cfg.t_end / rate - 1.0) < 0.10);
}

TEST_CASE("config guards") {
  const auto spec = with("heston", 1.0, 1.0, 0.5);
  SimConfig cfg;
  cfg.dt = 0.2;  // dt * a = 0.2 > 0.1
  cfg.t_end = 10.0;
  cfg.n_paths = 1;
  CHECK_THROWS_WITH_AS(simulate_paths(spec, cfg), doctest::Contains("stability guard"), Error);

  cfg.dt = 0.01;
  cfg.memory_cap_bytes = 1024;
  CHECK_THROWS_WITH_AS(simulate_paths(spec, cfg), doctest::Contains("MemoryCapExceeded"), Error);

  cfg.memory_cap_bytes = std::size_t(1) << 30;
  cfg.allow_negative_s = true;  // heston is not the stein-stein exception
  CHECK_THROWS_WITH_AS(simulate_paths(spec, cfg), doctest::Contains("InvalidConfig"), Error);
}

TEST_CASE("stein-stein unbounded mode reproduces the untruncated gaussian") {
  const auto spec = with("stein-stein", 1.0, 1.0, 0.5);
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 30.0;
  cfg.n_paths = 2000;
  cfg.seed = 59;
  cfg.record_stride = 500;
  cfg.allow_negative_s = true;
  const PathEnsemble ens = simulate_paths(spec, cfg, 2);
  const EnsembleStats st = ensemble_stats(ens, 10.0);
  CHECK(std::abs(st.mean_s - 1.0) < 3 * st.stderr_s);
  CHECK(std::abs(st.mean_s2 - 1.125) < 3 * st.stderr_s2);
}
