#include "svlab/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "svlab/error.hpp"
#include "svlab/rng.hpp"

namespace svlab {

namespace {

struct Form {
  // log_form parameters for the algebraic classes
  ModelClass cls;
  double b2;        // 2 beta
  double d1, d2;    // discriminants
  double ca, cs;    // 2a/g^2 and 2 a sigma/g^2
  double var;       // expou: stationary variance
};

Form make_form(const ModelSpec& spec) {
  Form f{};
  const FamilyClass fc = classify(spec);
  f.cls = fc.kind;
  f.b2 = 2.0 * spec.beta.value();
  f.d1 = fc.d1.value();
  f.d2 = fc.d2.value();
  f.ca = 2.0 * spec.a / (spec.g * spec.g);
  f.cs = f.ca * spec.sigma;
  f.var = spec.g * spec.g / (2.0 * spec.a);
  return f;
}

double log_form(const Form& f, double s) {
  switch (f.cls) {
    case ModelClass::ExpOU:
      return -s * s / (2.0 * f.var);
    case ModelClass::HestonType:
      return (-f.b2 + f.cs) * std::log(s) - f.ca * s;
    case ModelClass::GarchType:
      return (-f.b2 - f.ca) * std::log(s) - f.cs / s;
    default:
      return -f.b2 * std::log(s) - (f.ca / f.d2) * std::pow(s, f.d2) +
             (f.cs != 0 ? (f.cs / f.d1) * std::pow(s, f.d1) : 0.0);
  }
}

// peak guess for the axis-space integrand (log axis for the algebraic family)
double density_hint(const ModelSpec& spec, const Form& f) {
  if (spec.kind == ModelKind::ExpOU) return 0.0;
  double hint;
  switch (f.cls) {
    case ModelClass::HestonType:
      hint = std::log((1.0 - f.b2 + f.cs) / f.ca);
      break;
    case ModelClass::GarchType:
      hint = std::log(f.cs / (f.b2 + f.ca - 1.0));
      break;
    default:
      hint = spec.sigma > 0 ? std::log(spec.sigma) : std::log((1.0 - f.b2) / f.ca) / f.d2;
      break;
  }
  return std::isfinite(hint) ? hint : 0.0;
}

}  // namespace

double log_density_unnormalized(const ModelSpec& spec, double s) {
  validate_for_analytics(spec);
  if (spec.kind == ModelKind::Algebraic && !(s > 0))
    fail(Errc::NonPositiveArgument, "density argument must be > 0");
  return log_form(make_form(spec), s);
}

bool is_normalizable(const ModelSpec& spec) {
  if (spec.kind == ModelKind::ExpOU) return true;
  const Form f = make_form(spec);
  switch (f.cls) {
    case ModelClass::HestonType:
      return f.cs > f.b2 - 1.0;  // integrable at the origin
    case ModelClass::GarchType:
      return (f.b2 + f.ca > 1.0) && spec.sigma > 0;
    default:
      if (f.d2 > 0) {
        // decays at infinity; origin needs either a mild power or the
        // essential zero provided by sigma when d1 < 0
        if (f.b2 < 1.0) return true;
        return f.d1 < 0 && spec.sigma > 0;
      }
      // d2 < 0: power tail at infinity, essential zero at 0 only via sigma
      return f.b2 > 1.0 && spec.sigma > 0;
  }
}

double DensityCurve::log_pdf(double s) const {
  if (!normalized_) fail(Errc::UnnormalizedInput, "curve is not normalized");
  if (spec.kind == ModelKind::Algebraic && !(s > 0))
    return -std::numeric_limits<double>::infinity();
  return log_form(make_form(spec), s) - log_norm;
}

double DensityCurve::pdf(double s) const { return std::exp(log_pdf(s)); }

double DensityCurve::cdf(double s) const {
  if (!normalized_) fail(Errc::UnnormalizedInput, "curve is not normalized");
  const double w = log_axis_ ? (s > 0 ? std::log(s) : -std::numeric_limits<double>::infinity())
                             : s;
  if (w <= w_.front()) return 0.0;
  if (w >= w_.back()) return 1.0;
  const auto it = std::upper_bound(w_.begin(), w_.end(), w);
  const std::size_t i = static_cast<std::size_t>(it - w_.begin()) - 1;
  const double lo_cum = i == 0 ? 0.0 : cum_[i - 1];
  const double cell = cum_[i] - lo_cum;
  const double dw = w_[i + 1] - w_[i];
  const double r = (lw_[i + 1] - lw_[i]) / dw;
  const double t = w - w_[i];
  double frac;
  if (std::abs(r * dw) < 1e-12)
    frac = t / dw;
  else
    frac = std::expm1(r * t) / std::expm1(r * dw);
  return lo_cum + cell * frac;
}

double DensityCurve::quantile(double p) const {
  if (!normalized_) fail(Errc::UnnormalizedInput, "curve is not normalized");
  p = std::clamp(p, 0.0, 1.0);
  const auto it = std::lower_bound(cum_.begin(), cum_.end(), p);
  const std::size_t i = std::min<std::size_t>(it - cum_.begin(), cum_.size() - 1);
  const double lo_cum = i == 0 ? 0.0 : cum_[i - 1];
  const double cell = cum_[i] - lo_cum;
  const double dw = w_[i + 1] - w_[i];
  const double r = (lw_[i + 1] - lw_[i]) / dw;
  const double frac = cell > 0 ? (p - lo_cum) / cell : 0.0;
  double t;
  if (std::abs(r * dw) < 1e-12)
    t = frac * dw;
  else
    t = std::log1p(frac * std::expm1(r * dw)) / r;
  const double w = w_[i] + std::clamp(t, 0.0, dw);
  return log_axis_ ? std::exp(w) : w;
}

DensityCurve normalize(const ModelSpec& spec, const QuadConfig& cfg) {
  validate_for_analytics(spec);
  if (!is_normalizable(spec))
    fail(Errc::NotNormalizable, "stationary density is not normalizable for " + describe(spec));
  const Form f = make_form(spec);
  const bool log_axis = (spec.kind == ModelKind::Algebraic);

  // axis-space integrand: includes the ds = s du Jacobian on the log axis
  auto lam = [&](double w) {
    const double s = log_axis ? std::exp(w) : w;
    return log_form(f, s) + (log_axis ? w : 0.0);
  };

  const double hint = density_hint(spec, f);
  const LogIntegral zi = integrate_log(lam, hint, cfg);

  DensityCurve curve;
  curve.spec = spec;
  curve.log_norm = zi.log_value;
  curve.log_axis_ = log_axis;

  // effective support: axis-space integrand above peak - ln(1e30)
  const double support_drop = 30.0 * std::log(10.0);
  auto crossing = [&](double a, double b) {
    for (int i = 0; i < 60; ++i) {
      const double m = 0.5 * (a + b);
      (lam(m) > zi.peak_value - support_drop ? a : b) = m;
    }
    return 0.5 * (a + b);
  };
  const double w_min = crossing(zi.peak_u, zi.cut_lo);
  const double w_max = crossing(zi.peak_u, zi.cut_hi);
  curve.support = {log_axis ? std::exp(w_min) : w_min, log_axis ? std::exp(w_max) : w_max};

  // fine scan for quantile targets and curvature-weighted node placement
  const int fine_n = std::max(4 * cfg.grid_points, 4096);
  std::vector<double> fw(fine_n), fl(fine_n);
  const double flo = zi.cut_lo, fhi = zi.cut_hi;
  for (int i = 0; i < fine_n; ++i) {
    fw[i] = flo + (fhi - flo) * i / double(fine_n - 1);
    fl[i] = lam(fw[i]);
  }
  std::vector<double> fmass(fine_n - 1);
  double total = 0;
  for (int i = 0; i + 1 < fine_n; ++i) {
    const double dw = fw[i + 1] - fw[i];
    const double r = (fl[i + 1] - fl[i]) / dw;
    const double base = std::exp(fl[i] - zi.peak_value);
    fmass[i] = std::abs(r * dw) < 1e-12 ? base * dw : base * std::expm1(r * dw) / r;
    total += fmass[i];
  }
  double acc = 0;
  double q_lo = fw.front(), q_hi = fw.back();
  bool got_lo = false;
  for (int i = 0; i + 1 < fine_n; ++i) {
    acc += fmass[i];
    if (!got_lo && acc > 1e-6 * total) {
      q_lo = fw[i];
      got_lo = true;
    }
    if (acc < (1.0 - 1e-6) * total) q_hi = fw[i + 1];
  }

  // blended measure: half uniform in the axis coordinate, half uniform in the
  // total variation of the log-density (refines where |dlogP/dw| is large)
  double var_total = 0;
  for (int i = 0; i + 1 < fine_n; ++i)
    if (fw[i] >= q_lo && fw[i + 1] <= q_hi) var_total += std::abs(fl[i + 1] - fl[i]);
  std::vector<double> measure;
  std::vector<double> mw;
  measure.push_back(0);
  mw.push_back(q_lo);
  for (int i = 0; i + 1 < fine_n; ++i) {
    if (fw[i + 1] <= q_lo || fw[i] >= q_hi) continue;
    const double dw = fw[i + 1] - fw[i];
    const double dv = std::abs(fl[i + 1] - fl[i]);
    measure.push_back(measure.back() + 0.5 * dw / (q_hi - q_lo) +
                      0.5 * (var_total > 0 ? dv / var_total : 0.0));
    mw.push_back(fw[i + 1]);
  }
  const int np = cfg.grid_points;
  std::vector<double> w(np);
  const double mtot = measure.back();
  std::size_t j = 0;
  for (int i = 0; i < np; ++i) {
    const double target = mtot * i / double(np - 1);
    while (j + 1 < measure.size() && measure[j + 1] < target) ++j;
    if (j + 1 >= measure.size()) {
      w[i] = mw.back();
    } else {
      const double seg = measure[j + 1] - measure[j];
      const double fr = seg > 0 ? (target - measure[j]) / seg : 0.0;
      w[i] = mw[j] + fr * (mw[j + 1] - mw[j]);
    }
  }
  w.front() = q_lo;
  w.back() = q_hi;
  w.erase(std::unique(w.begin(), w.end()), w.end());

  curve.w_ = w;
  curve.grid.resize(w.size());
  curve.log_values.resize(w.size());
  curve.lw_.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    curve.grid[i] = log_axis ? std::exp(w[i]) : w[i];
    curve.log_values[i] = log_form(f, curve.grid[i]);
    curve.lw_[i] = lam(w[i]);
  }
  curve.cum_.resize(w.size() - 1);
  double c = 0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    const double dw = w[i + 1] - w[i];
    const double r = (curve.lw_[i + 1] - curve.lw_[i]) / dw;
    const double base = std::exp(curve.lw_[i] - zi.peak_value);
    c += std::abs(r * dw) < 1e-12 ? base * dw : base * std::expm1(r * dw) / r;
    curve.cum_[i] = c;
  }
  for (double& v : curve.cum_) v /= c;
  curve.normalized_ = true;
  return curve;
}

double log_normalization(const ModelSpec& spec, const QuadConfig& cfg) {
  validate_for_analytics(spec);
  if (!is_normalizable(spec))
    fail(Errc::NotNormalizable, "stationary density is not normalizable for " + describe(spec));
  const Form f = make_form(spec);
  const bool log_axis = (spec.kind == ModelKind::Algebraic);
  auto lam = [&](double w) {
    const double s = log_axis ? std::exp(w) : w;
    return log_form(f, s) + (log_axis ? w : 0.0);
  };
  return integrate_log(lam, density_hint(spec, f), cfg).log_value;
}

std::vector<double> sample_stationary(const DensityCurve& curve, std::size_t count,
                                      std::uint64_t seed) {
  if (!curve.normalized()) fail(Errc::UnnormalizedInput, "curve is not normalized");
  std::vector<double> out(count);
  const Philox4x32 rng(seed);
  for (std::size_t i = 0; i < count; ++i) out[i] = curve.quantile(sampler_uniform(rng, i));
  return out;
}

double stationary_moment_check(const DensityCurve& curve, int n) {
  if (!curve.normalized()) fail(Errc::UnnormalizedInput, "curve is not normalized");
  if (n < 0) fail(Errc::MomentDiverges, "order must be >= 0");
  const ModelSpec& spec = curve.spec;
  const Form f = make_form(spec);

  if (spec.kind == ModelKind::ExpOU) {
    if (n % 2 == 1) return 0.0;  // odd moments vanish by symmetry
    auto lam = [&](double w) { return n * w + log_form(f, std::exp(w)) + w; };
    const LogIntegral I = integrate_log(lam, 0.5 * std::log(f.var * std::max(n, 1)), {});
    return 2.0 * std::exp(I.log_value - curve.log_norm);
  }

  // analytic divergence check: power-law tails beat quadrature cutoffs
  if (f.cls == ModelClass::GarchType && n >= f.b2 + f.ca - 1.0)
    fail(Errc::MomentDiverges, "moment order exceeds the power-law tail index");
  if (f.cls == ModelClass::Generic && f.d2 < 0 && n >= f.b2 - 1.0)
    fail(Errc::MomentDiverges, "moment order exceeds the power-law tail index");

  auto lam = [&](double w) { return n * w + log_form(f, std::exp(w)) + w; };
  double hint = spec.sigma > 0 ? std::log(spec.sigma) : 0.0;
  if (f.cls == ModelClass::HestonType) hint = std::log((n + 1.0 - f.b2 + f.cs) / f.ca);
  const LogIntegral I = integrate_log(lam, hint, {});
  return std::exp(I.log_value - curve.log_norm);
}

}  // namespace svlab
