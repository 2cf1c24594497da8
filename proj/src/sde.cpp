#include "svlab/sde.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "svlab/error.hpp"

namespace svlab {

namespace {

enum PowKind { kPowZero = 0, kPowHalf, kPowOne, kPowThreeHalves, kPowTwo, kPowGeneral };

int pow_kind(const Rational& r) {
  if (r.is(0)) return kPowZero;
  if (r.is(1, 2)) return kPowHalf;
  if (r.is(1)) return kPowOne;
  if (r.is(3, 2)) return kPowThreeHalves;
  if (r.is(2)) return kPowTwo;
  return kPowGeneral;
}

inline double rpow(double s, int kind, double p) {
  switch (kind) {
    case kPowZero: return 1.0;
    case kPowHalf: return std::sqrt(s);
    case kPowOne: return s;
    case kPowThreeHalves: return s * std::sqrt(s);
    case kPowTwo: return s * s;
    default: return std::pow(s, p);
  }
}

}  // namespace

StepCoeffs make_step_coeffs(const ModelSpec& spec, bool allow_negative_s) {
  StepCoeffs c;
  c.expou = (spec.kind == ModelKind::ExpOU);
  c.a = spec.a;
  c.sigma = spec.sigma;
  c.g = spec.g;
  c.alpha = spec.alpha.value();
  c.beta = spec.beta.value();
  c.gamma = spec.gamma.value();
  c.alpha_kind = pow_kind(spec.alpha);
  c.beta_kind = pow_kind(spec.beta);
  c.gamma_kind = pow_kind(spec.gamma);
  c.reflect = !allow_negative_s;
  if (allow_negative_s && !c.expou) {
    if (!spec.alpha.is(0) || !spec.beta.is(0) || !spec.gamma.is(1))
      fail(Errc::InvalidConfig,
           "unbounded volatility is only well defined for alpha = beta = 0, gamma = 1");
  }
  return c;
}

State step(const State& st, const StepCoeffs& c, double dt, const NormalPair& nz) {
  const double sq_dt = std::sqrt(dt);
  if (c.expou) {
    State out;
    out.x = st.x + std::exp(c.sigma + st.s) * sq_dt * nz.n1;
    out.s = st.s - c.a * st.s * dt + c.g * sq_dt * nz.n2;
    return out;
  }
  State out;
  if (!c.reflect) {
    // Stein-Stein exception: alpha = beta = 0, gamma = 1, S unbounded
    out.x = st.x + st.s * sq_dt * nz.n1;
    out.s = st.s + c.a * (c.sigma - st.s) * dt + c.g * sq_dt * nz.n2;
    return out;
  }
  const double s_eff = std::max(st.s, 0.0);
  out.x = st.x + rpow(s_eff, c.gamma_kind, c.gamma) * sq_dt * nz.n1;
  const double s_raw = st.s + c.a * (c.sigma - st.s) * rpow(s_eff, c.alpha_kind, c.alpha) * dt +
                       c.g * rpow(s_eff, c.beta_kind, c.beta) * sq_dt * nz.n2;
  out.s = std::abs(s_raw);
  return out;
}

State step(const State& st, const ModelSpec& spec, double dt, const NormalPair& noises) {
  return step(st, make_step_coeffs(spec), dt, noises);
}

void validate_config(const ModelSpec& spec, const SimConfig& cfg) {
  validate(spec);
  if (!(cfg.dt > 0)) fail(Errc::InvalidConfig, "dt must be > 0");
  if (!(cfg.t_end > cfg.dt)) fail(Errc::InvalidConfig, "t_end must exceed dt");
  if (cfg.n_paths < 1) fail(Errc::InvalidConfig, "n_paths must be >= 1");
  if (cfg.record_stride < 1) fail(Errc::InvalidConfig, "record_stride must be >= 1");
  if (cfg.dt * spec.a > 0.1 + 1e-12)
    fail(Errc::InvalidConfig, "stability guard: dt * a must be <= 0.1");
  if (cfg.allow_negative_s) make_step_coeffs(spec, true);  // shape check
  if (spec.kind == ModelKind::Algebraic && !cfg.allow_negative_s) {
    const double s0 = cfg.initial_s.value_or(spec.sigma);
    const bool zero_ok = spec.beta.is(0);
    if (s0 < 0 || (s0 == 0 && !zero_ok))
      fail(Errc::InvalidConfig, "initial_s must be > 0 for the algebraic family");
  }
  const std::int64_t n_steps = static_cast<std::int64_t>(std::llround(cfg.t_end / cfg.dt));
  const std::int64_t n_rec = n_steps / cfg.record_stride + 1;
  const std::size_t bytes = std::size_t(cfg.n_paths) * std::size_t(n_rec) * 2 * sizeof(double);
  if (bytes > cfg.memory_cap_bytes)
    fail(Errc::MemoryCapExceeded, "ensemble storage " + std::to_string(bytes) +
                                      " bytes exceeds cap; raise record_stride or the cap");
}

PathEnsemble simulate_paths(const ModelSpec& spec, const SimConfig& cfg, int threads) {
  validate_config(spec, cfg);
  const StepCoeffs coeffs = make_step_coeffs(spec, cfg.allow_negative_s);
  const std::int64_t n_steps = static_cast<std::int64_t>(std::llround(cfg.t_end / cfg.dt));
  const std::int64_t n_rec = n_steps / cfg.record_stride + 1;

  PathEnsemble ens;
  ens.spec = spec;
  ens.config = cfg;
  ens.n_paths = cfg.n_paths;
  ens.times.resize(n_rec);
  for (std::int64_t k = 0; k < n_rec; ++k) ens.times[k] = double(k * cfg.record_stride) * cfg.dt;
  ens.x.assign(std::size_t(cfg.n_paths) * n_rec, 0.0);
  ens.s.assign(std::size_t(cfg.n_paths) * n_rec, 0.0);

  const double s0 =
      cfg.initial_s.value_or(spec.kind == ModelKind::ExpOU ? 0.0 : spec.sigma);
  const Philox4x32 rng(cfg.seed);

  auto run_range = [&](std::int64_t p_begin, std::int64_t p_end) {
    for (std::int64_t p = p_begin; p < p_end; ++p) {
      State st{cfg.initial_x, s0};
      double* xr = &ens.x[std::size_t(p) * n_rec];
      double* sr = &ens.s[std::size_t(p) * n_rec];
      xr[0] = st.x;
      sr[0] = st.s;
      std::int64_t rec = 1;
      for (std::int64_t k = 0; k < n_steps; ++k) {
        const NormalPair nz = step_noises(rng, std::uint64_t(p), std::uint64_t(k));
        st = step(st, coeffs, cfg.dt, nz);
        if ((k + 1) % cfg.record_stride == 0) {
          xr[rec] = st.x;
          sr[rec] = st.s;
          ++rec;
        }
      }
    }
  };

  const int n_threads = std::max(1, threads);
  if (n_threads == 1 || cfg.n_paths < 2) {
    run_range(0, cfg.n_paths);
  } else {
    std::vector<std::thread> pool;
    const std::int64_t chunk = (cfg.n_paths + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
      const std::int64_t b = std::min<std::int64_t>(t * chunk, cfg.n_paths);
      const std::int64_t e = std::min<std::int64_t>(b + chunk, cfg.n_paths);
      if (b < e) pool.emplace_back(run_range, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return ens;
}

ReturnSample extract_returns(const PathEnsemble& ens, double delta_t, double burn_in) {
  if (ens.times.size() < 2) fail(Errc::InsufficientHorizon, "ensemble has no recorded steps");
  const double grid_dt = ens.times[1] - ens.times[0];
  const double ratio = delta_t / grid_dt;
  const std::int64_t k_lag = static_cast<std::int64_t>(std::llround(ratio));
  if (k_lag < 1 || std::abs(ratio - double(k_lag)) > 1e-9 * std::max(1.0, ratio))
    fail(Errc::LagNotOnGrid, "delta_t must be a positive multiple of the recorded spacing");
  if (burn_in < 5.0 / ens.spec.a - 1e-12)
    fail(Errc::InvalidConfig, "burn_in must be >= 5 / a");

  std::size_t k0 = 0;
  while (k0 < ens.times.size() && ens.times[k0] < burn_in - 1e-12) ++k0;
  if (k0 + k_lag >= ens.times.size())
    fail(Errc::InsufficientHorizon, "horizon too short for the requested lag after burn-in");

  ReturnSample out;
  out.delta_t = double(k_lag) * grid_dt;
  for (std::int64_t p = 0; p < ens.n_paths; ++p) {
    for (std::size_t k = k0; k + k_lag < ens.times.size(); k += k_lag)
      out.values.push_back(ens.x_at(p, k + k_lag) - ens.x_at(p, k));
  }
  return out;
}

EnsembleStats ensemble_stats(const PathEnsemble& ens, double burn_in) {
  std::size_t k0 = 0;
  while (k0 < ens.times.size() && ens.times[k0] < burn_in - 1e-12) ++k0;
  if (k0 >= ens.times.size()) fail(Errc::InsufficientHorizon, "burn-in swallows the whole run");

  EnsembleStats st;
  st.min_s = ens.s.empty() ? 0.0 : ens.s[0];
  const std::size_t n_rec = ens.times.size();
  std::vector<double> pmean(ens.n_paths), pmean2(ens.n_paths);
  double sum_fx = 0, sum_fx2 = 0;
  for (std::int64_t p = 0; p < ens.n_paths; ++p) {
    double acc = 0, acc2 = 0;
    for (std::size_t k = 0; k < n_rec; ++k) {
      const double sv = ens.s_at(p, k);
      st.min_s = std::min(st.min_s, sv);
      if (k >= k0) {
        acc += sv;
        acc2 += sv * sv;
      }
    }
    const double cnt = double(n_rec - k0);
    pmean[p] = acc / cnt;
    pmean2[p] = acc2 / cnt;
    const double fx = ens.x_at(p, n_rec - 1);
    sum_fx += fx;
    sum_fx2 += fx * fx;
  }
  const double np = double(ens.n_paths);
  for (std::int64_t p = 0; p < ens.n_paths; ++p) {
    st.mean_s += pmean[p] / np;
    st.mean_s2 += pmean2[p] / np;
  }
  double v1 = 0, v2 = 0;
  for (std::int64_t p = 0; p < ens.n_paths; ++p) {
    v1 += (pmean[p] - st.mean_s) * (pmean[p] - st.mean_s);
    v2 += (pmean2[p] - st.mean_s2) * (pmean2[p] - st.mean_s2);
  }
  if (ens.n_paths > 1) {
    st.stderr_s = std::sqrt(v1 / (np - 1) / np);
    st.stderr_s2 = std::sqrt(v2 / (np - 1) / np);
  }
  const double mx = sum_fx / np;
  st.final_var_x = sum_fx2 / np - mx * mx;
  st.n_used = (n_rec - k0) * std::size_t(ens.n_paths);
  return st;
}

}  // namespace svlab
