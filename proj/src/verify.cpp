#include "svlab/verify.hpp"

#include <cmath>
#include <filesystem>

#include "svlab/acf.hpp"
#include "svlab/density.hpp"
#include "svlab/error.hpp"
#include "svlab/estimators.hpp"
#include "svlab/io.hpp"
#include "svlab/moments.hpp"
#include "svlab/sde.hpp"
#include "svlab/short_time.hpp"
#include "svlab/special.hpp"

namespace svlab {

namespace {

void push(std::vector<CheckResult>& out, const std::string& name, double measured, double bound,
          const std::string& detail, bool pass_when_below = true) {
  CheckResult r;
  r.name = name;
  r.measured = measured;
  r.bound = bound;
  r.detail = detail;
  r.pass = pass_when_below ? (measured <= bound) : (measured >= bound);
  out.push_back(r);
}

bool chain_closes(const ModelSpec& spec) {
  if (spec.kind != ModelKind::Algebraic || !spec.alpha.is(0)) return false;
  const bool beta_ok = spec.beta.is(0) || spec.beta.is(1, 2) || spec.beta.is(1);
  const bool gamma_ok = spec.gamma.is(1, 2) || spec.gamma.is(1);
  return beta_ok && gamma_ok;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / double(n - 1);
  return v;
}

void check_moment_chain(const ModelSpec& spec, std::vector<CheckResult>& out) {
  const double a = spec.a;
  // mu_{0,1}(t) relaxes as sigma + (mu_{0,1}(0) - sigma) e^{-a t} for every
  // alpha = 0 member; start off-equilibrium to exercise the transient
  const double s0 = 0.5 * spec.sigma + 0.1;
  const auto grid = linspace(0.0, 10.0 / a, 101);
  const MomentTrajectory tr = evolve_moments(spec, 0, 4, grid, MomentTable::point(0.0, s0));
  double err01 = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double exact = spec.sigma + (s0 - spec.sigma) * std::exp(-a * grid[k]);
    err01 = std::max(err01, std::abs(tr.value(0, 1, k) - exact));
  }
  push(out, "moment-ode-mu01-closed-form", err01, 1e-6, "max abs error over [0, 10/a]");

  // relaxation to the closed-form stationary values
  const auto grid2 = linspace(0.0, 20.0 / a, 21);
  const MomentTrajectory tr2 = evolve_moments(spec, 0, 4, grid2, MomentTable::point(0.0, s0));
  double rel = 0;
  for (int n = 1; n <= 4; ++n) {
    const MomentValue mv = stationary_s_moment(spec, n);
    if (!mv.finite() || tr2.at(0, n).status == MomentStatus::Divergent) continue;
    const double got = tr2.value(0, n, grid2.size() - 1);
    rel = std::max(rel, std::abs(got - mv.value) / std::abs(mv.value));
  }
  push(out, "moment-ode-vs-stationary", rel, 1e-6, "max rel error at t = 20/a, n <= 4");
}

void check_gaussianization(const ModelSpec& spec, std::vector<CheckResult>& out) {
  const double a = spec.a;
  const MomentValue m4lim = longtime_limit(spec, 2, 0);
  if (!m4lim.finite()) return;
  const bool slow = spec.beta.is(1);  // 1/t transients carry a larger constant
  const double t_end = (slow ? 250.0 : 50.0) / a;
  const auto grid = linspace(10.0 / a, t_end, 41);
  const MomentTrajectory tr =
      evolve_moments(spec, 4, 2, grid, MomentTable::point(0.0, spec.sigma));
  // slope of mu_{2,0} on the tail of the grid
  const std::size_t n = grid.size();
  const double slope = (tr.value(2, 0, n - 1) - tr.value(2, 0, 0)) / (grid[n - 1] - grid[0]);
  const MomentValue d = stationary_s_moment(spec, spec.gamma.is(1) ? 2 : 1);
  push(out, "varx-slope-vs-diffusion-scale", std::abs(slope / d.value - 1.0), 0.02,
       "relative error of d Var(X)/dt");
  const double kurt =
      tr.value(4, 0, n - 1) / (3.0 * tr.value(2, 0, n - 1) * tr.value(2, 0, n - 1));
  push(out, "kurtosis-ratio-gaussian", std::abs(kurt - 1.0), 0.02,
       "mu40 / (3 mu20^2) - 1 at t = " + fmt_double(t_end));
}

void check_density(const ModelSpec& spec, std::vector<CheckResult>& out, std::uint64_t seed) {
  const DensityCurve curve = normalize(spec);
  // trapezoid mass of the normalized curve on its own grid
  double mass = 0;
  for (std::size_t i = 0; i + 1 < curve.grid.size(); ++i) {
    const double p0 = std::exp(curve.log_values[i] - curve.log_norm);
    const double p1 = std::exp(curve.log_values[i + 1] - curve.log_norm);
    mass += 0.5 * (p0 + p1) * (curve.grid[i + 1] - curve.grid[i]);
  }
  push(out, "density-grid-mass", std::abs(mass - 1.0), 1e-3, "trapezoid integral vs 1");

  double rel = 0;
  int used = 0;
  for (int n = 1; n <= 4; ++n) {
    const MomentValue mv = stationary_s_moment(spec, n);
    if (!mv.finite()) continue;
    if (spec.kind == ModelKind::Algebraic && spec.beta.is(0) &&
        spec.sigma < 3.0 * spec.g / std::sqrt(spec.a))
      break;  // truncated-Gaussian regime: closed forms ignore the boundary
    const double q = stationary_moment_check(curve, n);
    rel = std::max(rel, std::abs(q - mv.value) / std::abs(mv.value));
    ++used;
  }
  if (used > 0)
    push(out, "density-moments-vs-closed-form", rel, 1e-6, "quadrature vs closed form, n <= 4");

  const std::size_t n_samp = 20000;
  const auto samples = sample_stationary(curve, n_samp, seed ^ 0xD5A4);
  const double ks = ks_distance(samples, [&](double s) { return curve.cdf(s); });
  push(out, "sample-ks-self-consency", ks, 1.63 / std::sqrt(double(n_samp)),
       "inverse-CDF samples vs own curve at 99%");
}

void check_sim_vs_density(const ModelSpec& spec, const VerifyOptions& opt,
                          std::vector<CheckResult>& out) {
  const double a = spec.a;
  SimConfig cfg;
  cfg.dt = opt.dt_factor / a;
  cfg.t_end = opt.t_end_factor / a;
  cfg.n_paths = opt.n_paths;
  cfg.seed = opt.seed;
  cfg.record_stride = std::max<std::int64_t>(1, std::llround(1.0 / (a * cfg.dt)));
  const PathEnsemble ens = simulate_paths(spec, cfg, opt.threads);

  const double burn = 10.0 / a;
  const EnsembleStats st = ensemble_stats(ens, burn);
  const DensityCurve curve = normalize(spec);
  const double m1 = stationary_moment_check(curve, 1);
  const double m2 = stationary_moment_check(curve, 2);
  push(out, "sim-mean-s-vs-density", std::abs(st.mean_s - m1),
       3.0 * st.stderr_s + 2e-3 * std::abs(m1), "pooled <S> vs quadrature, 3 se + O(dt)");
  push(out, "sim-s2-vs-density", std::abs(st.mean_s2 - m2),
       3.0 * st.stderr_s2 + 4e-3 * std::abs(m2), "pooled <S^2> vs quadrature, 3 se + O(dt)");

  if (spec.kind == ModelKind::Algebraic)
    push(out, "sim-positivity", st.min_s, 0.0, "min recorded S", false);

  // thinned stationary samples vs the curve CDF
  std::vector<double> samples;
  std::size_t k0 = 0;
  while (k0 < ens.times.size() && ens.times[k0] < burn - 1e-12) ++k0;
  const std::size_t stride = 2;  // records are ~1/a apart
  for (std::int64_t p = 0; p < ens.n_paths; ++p)
    for (std::size_t k = k0; k < ens.times.size(); k += stride)
      samples.push_back(ens.s_at(p, k));
  const double ks = ks_distance(samples, [&](double s) { return curve.cdf(s); });
  const bool warned = validate(spec).positivity_warning;
  push(out, "sim-ks-vs-density", ks, warned ? 0.03 : 0.015,
       "stationary S samples vs zero-current density");
}

void check_acf(const ModelSpec& spec, const VerifyOptions& opt, std::vector<CheckResult>& out,
               std::vector<std::string>* acf_rows) {
  const MomentValue m2 = stationary_s_moment(spec, 2);
  if (!m2.finite()) return;
  const double a = spec.a;
  SimConfig cfg;
  cfg.dt = opt.dt_factor / a;
  cfg.t_end = opt.t_end_factor / a;
  cfg.n_paths = opt.n_paths;
  cfg.seed = opt.seed ^ 0xACF0;
  cfg.record_stride = std::max<std::int64_t>(1, std::llround(0.25 / (a * cfg.dt)));
  const PathEnsemble ens = simulate_paths(spec, cfg, opt.threads);

  std::vector<double> lags;
  for (int i = 0; i <= 20; ++i) lags.push_back(0.25 * i / a);
  const AcfCurve an = analytic_acf(spec, 1, 1, lags);
  AcfCurve em = empirical_acf(ens, 1, 1, lags, 10.0 / a);
  em.asymptote = an.asymptote;

  double worst = 0;
  for (std::size_t i = 0; i < lags.size(); ++i) {
    const double se = std::max(em.stderrs[i], 1e-12);
    worst = std::max(worst, std::abs(em.values[i] - an.values[i]) / se);
  }
  push(out, "acf-analytic-vs-empirical", worst, 3.0, "max |diff|/jackknife se, lags <= 5/a");

  const DecayFit fit = fit_decay_rate(an, 0.0, 2.0 / a);
  push(out, "acf-analytic-decay-rate", std::abs(fit.rate / a - 1.0), 1e-6,
       "v = 1 curve decays at rate a");
  const DecayFit efit = fit_decay_rate(em, 0.0, 1.0 / a);
  // the correlated-lag noise of this fit scales as 1/sqrt(path-time);
  // 0.10 relative at 6e4 path-time units, calibrated against the engine
  const double path_time = double(cfg.n_paths) * (cfg.t_end - 10.0 / a) * a;
  const double rate_bound = 0.05 + 0.20 * std::sqrt(6e4 / path_time);
  push(out, "acf-empirical-decay-rate", std::abs(efit.rate / a - 1.0), rate_bound,
       "fitted rate vs a (bound scales with ensemble size)");

  if (acf_rows) {
    for (std::size_t i = 0; i < lags.size(); ++i)
      acf_rows->push_back(fmt_double(lags[i]) + "," + fmt_double(an.values[i]) + ",0,analytic");
    for (std::size_t i = 0; i < lags.size(); ++i)
      acf_rows->push_back(fmt_double(lags[i]) + "," + fmt_double(em.values[i]) + "," +
                          fmt_double(em.stderrs[i]) + ",empirical");
  }
}

void check_short_time(const ModelSpec& spec, std::vector<CheckResult>& out) {
  const FamilyClass fc = classify(spec);
  ShortTime st(spec);
  const double dt = 0.01 / spec.a;

  // mixing integral must be a probability density in dx (negative-sign gate)
  {
    auto outer = [&](double v) {
      const double dx = std::exp(v);
      return st.log_mixing_density(dx, dt) + v;
    };
    const LogIntegral I = integrate_log(outer, std::log(spec.sigma > 0 ? spec.sigma : 1.0) +
                                                    0.5 * std::log(dt));
    const double total = 2.0 * std::exp(I.log_value);
    push(out, "mixing-normalization", std::abs(total - 1.0), 1e-6,
         "outer quadrature of the return density");
  }

  if (spec.gamma.is(1, 2) && fc.kind == ModelClass::HestonType) {
    double rel = 0;
    for (double y : {2.0, 5.0, 10.0, 20.0}) {
      const double dx = y * std::sqrt(dt);
      const double lq = st.log_mixing_density(dx, dt);
      const double la = st.log_tail_asymptote(dx, dt);
      rel = std::max(rel, std::abs(std::exp(la - lq) - 1.0));
    }
    push(out, "bessel-closed-form-vs-quadrature", rel, 1e-4, "exact heston-type density");
    return;
  }
  if (spec.gamma.is(1, 2) && fc.kind == ModelClass::GarchType) {
    double rel = 0;
    for (double y : {2.0, 5.0, 10.0, 20.0}) {
      const double dx = y * std::sqrt(dt);
      const double lq = st.log_mixing_density(dx, dt);
      const double la = st.log_tail_asymptote(dx, dt);
      rel = std::max(rel, std::abs(std::exp(la - lq) - 1.0));
    }
    push(out, "powerlaw-closed-form-vs-quadrature", rel, 1e-4, "exact garch-type density");
    return;
  }
  if (spec.kind == ModelKind::ExpOU) return;  // handled by the expou block

  // stretched-exponential classes: log agreement on the documented window
  TailAsymptote c;
  try {
    c = saddle_constants(spec, spec.gamma);
  } catch (const Error& e) {
    if (e.code() == Errc::DegenerateExponent) {
      push(out, "saddle-degenerate-exponent", 0, 0, "no algebraic tail scale; quadrature only");
      return;
    }
    throw;
  }
  double worst = 0;
  int used = 0;
  for (double y : {8.0, 12.0, 18.0, 27.0, 40.0}) {
    if (!c.in_window(y, spec.sigma)) continue;
    const double dx = y * std::sqrt(dt);
    const double lq = st.log_mixing_density(dx, dt);
    const double la = st.log_tail_asymptote(dx, dt);
    worst = std::max(worst, std::abs(la - lq) / std::abs(lq));
    ++used;
  }
  if (used > 0)
    push(out, "saddle-asymptote-vs-quadrature", worst, 0.05,
         "relative log error on the tail window");
}

void check_expou(const ModelSpec& spec, const VerifyOptions& opt, std::vector<CheckResult>& out) {
  // Lambert round trip over the full domain
  double worst = 0;
  const double lo = -std::exp(-1.0) + 1e-6;
  for (int i = 0; i < 10000; ++i) {
    const double u = -6.0 + (std::log10(1e12 + std::exp(-1.0)) + 6.0) * i / 9999.0;
    const double y = lo + std::pow(10.0, u) - 1e-6;
    const double w = lambert_w0(y);
    worst = std::max(worst, std::abs(w * std::exp(w) - y) / std::max(1.0, std::abs(y)));
  }
  push(out, "lambert-roundtrip", worst, 1e-12, "max residual over [-1/e+1e-6, 1e12]");

  // saddle-point tail vs quadrature
  ShortTime st(spec);
  const double dt = 0.01 / spec.a;
  const double g2 = spec.g * spec.g;
  double worst_log = 0;
  for (double lxi = 2.0; lxi <= 6.01; lxi += 0.5) {
    const double xi = std::pow(10.0, lxi);
    const double dx = std::exp(spec.sigma) * std::sqrt(2.0 * spec.a * dt * xi / g2);
    const double lq = st.log_mixing_density(dx, dt);
    const double la = log_expou_tail(spec, dx, dt);
    worst_log = std::max(worst_log, std::abs(la - lq) / std::abs(lq));
  }
  push(out, "expou-saddle-vs-quadrature", worst_log, 0.05,
       "relative log error for xi in [1e2, 1e6]");

  // MC variance growth rate
  SimConfig cfg;
  cfg.dt = 5.0 * opt.dt_factor / spec.a;
  cfg.t_end = 50.0 / spec.a;
  cfg.n_paths = opt.n_paths * 4;
  cfg.seed = opt.seed ^ 0xE120;
  cfg.record_stride = std::max<std::int64_t>(1, std::llround(5.0 / (spec.a * cfg.dt)));
  const PathEnsemble ens = simulate_paths(spec, cfg, opt.threads);
  const EnsembleStats stats = ensemble_stats(ens, 10.0 / spec.a);
  const double expected = std::exp(2.0 * spec.sigma + g2 / spec.a);
  const double got = stats.final_var_x / cfg.t_end;
  push(out, "expou-varx-rate", std::abs(got / expected - 1.0), 0.03,
       "Var(X_t)/t vs exp(2 sigma + g^2/a) at t = 50/a");
}

void check_determinism(const ModelSpec& spec, const VerifyOptions& opt,
                       std::vector<CheckResult>& out) {
  SimConfig cfg;
  cfg.dt = 0.01 / spec.a;
  cfg.t_end = 2.0 / spec.a;
  cfg.n_paths = 64;
  cfg.seed = opt.seed;
  const PathEnsemble e1 = simulate_paths(spec, cfg, 1);
  const PathEnsemble e2 = simulate_paths(spec, cfg, 4);
  bool same = e1.x == e2.x && e1.s == e2.s;
  push(out, "thread-count-determinism", same ? 0.0 : 1.0, 0.0, "bitwise ensemble comparison");
}

}  // namespace

std::vector<CheckResult> run_verification(const ModelSpec& spec, const VerifyOptions& opt) {
  validate(spec);
  std::vector<CheckResult> out;
  std::vector<std::string> acf_rows;

  if (spec.kind == ModelKind::ExpOU) {
    check_expou(spec, opt, out);
    check_determinism(spec, opt, out);
  } else {
    if (chain_closes(spec)) {
      check_moment_chain(spec, out);
      check_gaussianization(spec, out);
    }
    if (is_normalizable(spec)) {
      check_density(spec, out, opt.seed);
      if (validate_for_analytics(spec).spec.kind == ModelKind::Algebraic)
        check_short_time(spec, out);
      check_sim_vs_density(spec, opt, out);
      if (chain_closes(spec)) check_acf(spec, opt, out, opt.out_dir.empty() ? nullptr : &acf_rows);
    }
    check_determinism(spec, opt, out);
  }

  if (!opt.out_dir.empty()) {
    std::filesystem::create_directories(opt.out_dir);
    Manifest man;
    man.command = "verify";
    man.set("spec", describe(spec));
    man.set("seed", static_cast<long long>(opt.seed));
    std::vector<std::string> rows;
    for (const auto& c : out)
      rows.push_back(c.name + "," + (c.pass ? "pass" : "fail") + "," + fmt_double(c.measured) +
                     "," + fmt_double(c.bound));
    write_csv(opt.out_dir + "/verify_checks.csv", man, "check,result,measured,bound", rows);
    if (!acf_rows.empty())
      write_csv(opt.out_dir + "/verify_acf.csv", man, "lag,value,stderr,source", acf_rows);
  }
  return out;
}

}  // namespace svlab
