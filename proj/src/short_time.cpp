#include "svlab/short_time.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "svlab/density.hpp"
#include "svlab/error.hpp"
#include "svlab/special.hpp"

namespace svlab {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Substitution model behind the saddle analysis: after s = lambda * T(u)
// the mixing integral becomes N G Integral exp(-xi/2 psi(u; eta)) du with
//   psi(u; eta) = term(u, e_k) + term(u, e_d) - eta term(u, e_e),
// term(u, e) = u^e on (0, inf) for the algebraic substitution or e^{e u} on R
// for the exponential one.
struct SaddleModel {
  bool exp_terms = false;
  double e_k = 0, e_d = 0, e_e = 0;
  double xi_scale = 0;   // xi  = xi_scale * y^stretch
  double eta_scale = 0;  // eta = eta_scale * sigma * y^eta_ypow
  double g_scale = 0;    // G   = g_scale * y^g_ypow
  double g_ypow = 0;
  double stretch = 0;
  double eta_ypow = 0;
  bool has_eta = true;
};

double term(const SaddleModel& m, double u, double e) {
  return m.exp_terms ? std::exp(e * u) : std::pow(u, e);
}
double term_d1(const SaddleModel& m, double u, double e) {
  return m.exp_terms ? e * std::exp(e * u) : e * std::pow(u, e - 1.0);
}
double term_d2(const SaddleModel& m, double u, double e) {
  return m.exp_terms ? e * e * std::exp(e * u) : e * (e - 1.0) * std::pow(u, e - 2.0);
}
double term_d3(const SaddleModel& m, double u, double e) {
  return m.exp_terms ? e * e * e * std::exp(e * u)
                     : e * (e - 1.0) * (e - 2.0) * std::pow(u, e - 3.0);
}

SaddleModel build_model(const ModelSpec& spec, const Rational& gamma) {
  const FamilyClass fc = classify(spec);
  const double a = spec.a, g2 = spec.g * spec.g;
  const double alpha = spec.alpha.value(), beta = spec.beta.value();
  const double d1 = fc.d1.value(), d2 = fc.d2.value();
  SaddleModel m;

  if (gamma.is(1, 2)) {
    if ((fc.d2 + Rational(1)).is(0))
      fail(Errc::DegenerateExponent, "3 + alpha - 2 beta = 0 (no algebraic tail scale)");
    if (fc.d2.num <= 0)
      fail(Errc::UnsupportedClass, "saddle analysis needs 2 + alpha - 2 beta > 0");
    const double d3 = 3.0 + alpha - 2.0 * beta;
    m.stretch = 2.0 * d2 / d3;
    m.eta_ypow = -2.0 / d3;
    m.xi_scale = std::pow(4.0 * a / (g2 * d2), 1.0 / d3);
    m.eta_scale = std::pow(4.0 * a / g2, 1.0 / d3) * std::pow(d2, d2 / d3) / d1;
    if (spec.beta.is(1, 4)) {
      m.exp_terms = true;
      m.e_k = -1.0;
      m.e_d = d2;
      m.e_e = d1;
      m.g_scale = 1.0;
      m.g_ypow = 0.0;
    } else {
      const double q = 1.0 - 4.0 * beta;
      m.e_k = -2.0 / q;
      m.e_d = 2.0 * d2 / q;
      m.e_e = 2.0 * d1 / q;
      m.g_scale = (2.0 / q) * std::pow(g2 * d2 / (4.0 * a), q / (2.0 * d3));
      m.g_ypow = q / d3;
    }
    return m;
  }

  if (!gamma.is(1)) fail(Errc::UnsupportedGamma, "saddle analysis supports gamma in {1/2, 1}");

  if (fc.kind == ModelClass::HestonType) {
    // the algebraic weight is absorbed into the substitution exactly
    const double nu = -2.0 * beta + 2.0 * a * spec.sigma / g2;
    if (!(nu > 0))
      fail(Errc::UnsupportedClass, "gamma = 1 heston-type saddle needs 2 a sigma/g^2 > 2 beta");
    m.e_k = -2.0 / nu;
    m.e_d = 1.0 / nu;
    m.has_eta = false;
    m.stretch = 2.0 / 3.0;
    m.eta_ypow = 0.0;
    m.xi_scale = std::pow(4.0 * a / g2, 2.0 / 3.0);
    m.eta_scale = 0.0;
    m.g_scale = (1.0 / nu) * std::pow(g2 / (4.0 * a), nu / 3.0);
    m.g_ypow = 2.0 * nu / 3.0;
    return m;
  }

  if ((fc.d2 + Rational(2)).is(0)) fail(Errc::DegenerateExponent, "4 + alpha - 2 beta = 0");
  if (fc.d2.num <= 0)
    fail(Errc::UnsupportedClass, "saddle analysis needs 2 + alpha - 2 beta > 0");
  const double d4 = 4.0 + alpha - 2.0 * beta;
  const double d3 = 3.0 + alpha - 2.0 * beta;
  m.stretch = 2.0 * d2 / d4;
  m.eta_ypow = -2.0 / d4;
  m.xi_scale = std::pow(4.0 * a / (g2 * d2), 2.0 / d4);
  m.eta_scale = std::pow(4.0 * a / g2, 1.0 / d4) * std::pow(d2, d3 / d4) / d1;
  if (spec.beta.is(0)) {
    m.exp_terms = true;
    m.e_k = 2.0;
    m.e_d = -d2;
    m.e_e = -d1;
    m.g_scale = 1.0;
    m.g_ypow = 0.0;
  } else {
    m.e_k = 1.0 / beta;
    m.e_d = -d2 / (2.0 * beta);
    m.e_e = -d1 / (2.0 * beta);
    m.g_scale = (1.0 / (2.0 * beta)) * std::pow(g2 * d2 / (4.0 * a), -2.0 * beta / d4);
    m.g_ypow = -4.0 * beta / d4;
  }
  return m;
}

// ExpOU saddle: exact stationary point of
// f(s) = rho/2 e^{-2s} + s^2/(2v) + s via the Lambert function.
struct ExpOUSaddle {
  double s_star, f_star, f_pp, v;
};

ExpOUSaddle expou_saddle(const ModelSpec& spec, double dx, double dt) {
  const double v = spec.g * spec.g / (2.0 * spec.a);
  const double z = std::abs(dx) * std::exp(-spec.sigma);
  const double rho = z * z / dt;
  ExpOUSaddle out;
  out.v = v;
  const double arg = 2.0 * v * rho * std::exp(2.0 * v);
  const double s = 0.5 * lambert_w0(arg) - v;  // solves rho e^{-2s} = s/v + 1
  out.s_star = s;
  out.f_star = (s + v) / (2.0 * v) + s * s / (2.0 * v) + s;
  out.f_pp = (2.0 * (s + v) + 1.0) / v;
  return out;
}

}  // namespace

bool TailAsymptote::in_window(double y, double sigma) const {
  if (form != TailForm::StretchedExponential) return true;
  return std::abs(r_3 * sigma * std::pow(y, eta_ypow)) < 0.1;
}

TailAsymptote saddle_constants(const ModelSpec& spec, const Rational& gamma) {
  validate(spec);
  if (spec.kind != ModelKind::Algebraic)
    fail(Errc::UnsupportedClass, "saddle constants apply to the algebraic family");
  const SaddleModel m = build_model(spec, gamma);

  // safeguarded minimization of psi(u; 0); bracket from the closed-form guess
  auto psi0 = [&](double u) { return term(m, u, m.e_k) + term(m, u, m.e_d); };
  const double ratio = -m.e_k / m.e_d;
  double guess = m.exp_terms ? std::log(ratio) / (m.e_d - m.e_k)
                             : std::pow(ratio, 1.0 / (m.e_d - m.e_k));
  if (!std::isfinite(guess)) fail(Errc::MinimizationFailure, "no interior saddle");
  double lo = m.exp_terms ? guess - 2.0 : guess / 8.0;
  double hi = m.exp_terms ? guess + 2.0 : guess * 8.0;
  for (int k = 0; k < 60 && psi0(lo) <= psi0(guess); ++k) lo = m.exp_terms ? lo - 2.0 : lo / 4.0;
  for (int k = 0; k < 60 && psi0(hi) <= psi0(guess); ++k) hi = m.exp_terms ? hi + 2.0 : hi * 4.0;
  const double u0 = minimize_scalar(psi0, lo, hi, 1e-13);
  const double psi_star = psi0(u0);
  const double psi_pp = term_d2(m, u0, m.e_k) + term_d2(m, u0, m.e_d);
  const double psi_ppp = term_d3(m, u0, m.e_k) + term_d3(m, u0, m.e_d);
  if (!(psi_pp > 0)) fail(Errc::MinimizationFailure, "saddle is not a minimum");

  TailAsymptote c;
  c.form = TailForm::StretchedExponential;
  c.cls = classify(spec).kind;
  c.gamma = gamma;
  c.stretch_exponent = m.stretch;
  c.prefactor_power = m.g_ypow - 0.5 * m.stretch;
  c.eta_ypow = m.eta_ypow;
  c.u_star = u0;
  c.psi_star = psi_star;
  c.psi_pp = psi_pp;
  c.r_1 = 0.5 * m.xi_scale * psi_star;
  c.r_n = m.g_scale * std::sqrt(4.0 * std::numbers::pi / (m.xi_scale * psi_pp));
  if (m.has_eta) {
    const double A = term(m, u0, m.e_e);
    const double A1 = term_d1(m, u0, m.e_e);
    const double A2 = term_d2(m, u0, m.e_e);
    const double u1 = A1 / psi_pp;  // first-order eta-shift of the saddle
    c.r_2 = 0.5 * m.xi_scale * m.eta_scale * A;
    c.r_2b = 0.25 * m.xi_scale * m.eta_scale * m.eta_scale * A1 * A1 / psi_pp;
    c.r_3 = -0.5 * m.eta_scale * (psi_ppp * u1 - A2) / psi_pp;
  }
  return c;
}

ShortTime::ShortTime(const ModelSpec& spec, const QuadConfig& cfg)
    : spec_(spec), fclass_(classify(spec)), cfg_(cfg) {
  validate_for_analytics(spec);
  log_z_ = (spec.kind == ModelKind::ExpOU) ? 0.0 : log_normalization(spec, cfg);
}

double ShortTime::log_mixing_density(double dx, double dt) const {
  if (!(dt > 0)) fail(Errc::NonPositiveArgument, "dt must be > 0");
  const double y2 = dx * dx / dt;

  if (spec_.kind == ModelKind::ExpOU) {
    const double v = spec_.g * spec_.g / (2.0 * spec_.a);
    const double rho = y2 * std::exp(-2.0 * spec_.sigma);
    auto lam = [&](double s) {
      return -(spec_.sigma + s) - 0.5 * rho * std::exp(-2.0 * s) - s * s / (2.0 * v);
    };
    const double hint = rho > 1.0 ? expou_saddle(spec_, dx, dt).s_star : 0.0;
    const LogIntegral I = integrate_log(lam, hint, cfg_);
    return -0.5 * kLog2Pi - 0.5 * std::log(dt) - 0.5 * std::log(2.0 * std::numbers::pi * v) +
           I.log_value;
  }

  const double gamma = spec_.gamma.value();
  auto lam = [&](double w) {
    const double s = std::exp(w);
    return (1.0 - gamma) * w - 0.5 * y2 * std::exp(-2.0 * gamma * w) +
           log_density_unnormalized(spec_, s);
  };
  // peak: between the kernel balance point and the density mode
  double hint = spec_.sigma > 0 ? std::log(spec_.sigma) : 0.0;
  if (y2 > 1.0) hint = std::max(hint, std::log(y2) / (2.0 * gamma + 1.0));
  const LogIntegral I = integrate_log(lam, hint, cfg_);
  return -0.5 * kLog2Pi - 0.5 * std::log(dt) + I.log_value - log_z_;
}

double ShortTime::mixing_density(double dx, double dt) const {
  return std::exp(log_mixing_density(dx, dt));
}

double mixing_density(const ModelSpec& spec, double dx, double dt, const QuadConfig& cfg) {
  return ShortTime(spec, cfg).mixing_density(dx, dt);
}

namespace {

double log_tail_common(const ModelSpec& spec, const FamilyClass& fc, double log_z, double dx,
                       double dt) {
  if (!(dt > 0)) fail(Errc::NonPositiveArgument, "dt must be > 0");
  const double y = std::abs(dx) / std::sqrt(dt);
  if (!(y > 0)) fail(Errc::OutOfDomain, "tail asymptote needs dx != 0");
  const double a = spec.a, g2 = spec.g * spec.g;

  if (spec.gamma.is(1, 2)) {
    if (fc.kind == ModelClass::HestonType) {
      // exact: Integral s^{mu-1} e^{-A/s - B s} ds = 2 (A/B)^{mu/2} K_mu(2 sqrt(AB))
      const double mu = 0.5 - 2.0 * spec.beta.value() + 2.0 * a * spec.sigma / g2;
      const double A = 0.5 * y * y;
      const double B = 2.0 * a / g2;
      return -log_z - 0.5 * kLog2Pi - 0.5 * std::log(dt) + std::log(2.0) +
             0.5 * mu * (std::log(A) - std::log(B)) +
             log_bessel_k(std::abs(mu), 2.0 * std::sqrt(A * B));
    }
    if (fc.kind == ModelClass::GarchType) {
      // exact: the inverse substitution gives a Gamma integral
      const double c = 0.5 + 2.0 * spec.beta.value() + 2.0 * a / g2;
      const double A = 0.5 * y * y;
      const double cs = 2.0 * a * spec.sigma / g2;
      return -log_z - 0.5 * kLog2Pi - 0.5 * std::log(dt) + std::lgamma(c - 1.0) -
             (c - 1.0) * std::log(A + cs);
    }
  } else if (fc.kind == ModelClass::GarchType) {
    // leading large-y coefficient of the Gamma-kernel integral
    const double c = 2.0 * spec.beta.value() + 2.0 * a / g2;
    return -log_z - 0.5 * kLog2Pi - 0.5 * std::log(dt) - std::log(2.0) +
           std::lgamma(0.5 * c) - 0.5 * c * std::log(0.5 * y * y);
  }

  const TailAsymptote c = saddle_constants(spec, spec.gamma);
  double lp = -log_z - 0.5 * kLog2Pi - 0.5 * std::log(dt) + std::log(c.r_n) +
              c.prefactor_power * std::log(y) - c.r_1 * std::pow(y, c.stretch_exponent);
  if (c.r_2 != 0) {
    lp += c.r_2 * spec.sigma * std::pow(y, c.stretch_exponent + c.eta_ypow);
    lp += c.r_2b * spec.sigma * spec.sigma *
          std::pow(y, c.stretch_exponent + 2.0 * c.eta_ypow);
  }
  const double corr = 1.0 + c.r_3 * spec.sigma * std::pow(y, c.eta_ypow);
  lp += std::log(std::max(corr, 0.1));  // clamped far outside the validity window
  return lp;
}

}  // namespace

double ShortTime::log_tail_asymptote(double dx, double dt) const {
  if (spec_.kind == ModelKind::ExpOU) return log_expou_tail(spec_, dx, dt);
  return log_tail_common(spec_, fclass_, log_z_, dx, dt);
}

double tail_asymptote_gamma_half(const ModelSpec& spec, double dx, double dt) {
  if (!spec.gamma.is(1, 2)) fail(Errc::UnsupportedGamma, "spec must have gamma = 1/2");
  ShortTime st(spec);
  return std::exp(st.log_tail_asymptote(dx, dt));
}

double tail_asymptote_gamma_one(const ModelSpec& spec, double dx, double dt) {
  if (!spec.gamma.is(1)) fail(Errc::UnsupportedGamma, "spec must have gamma = 1");
  ShortTime st(spec);
  return std::exp(st.log_tail_asymptote(dx, dt));
}

double log_tail_asymptote(const ModelSpec& spec, double dx, double dt) {
  return ShortTime(spec).log_tail_asymptote(dx, dt);
}

double log_expou_tail(const ModelSpec& spec, double dx, double dt) {
  validate(spec);
  if (spec.kind != ModelKind::ExpOU) fail(Errc::UnsupportedClass, "expou_tail needs kind=expou");
  if (!(dt > 0)) fail(Errc::NonPositiveArgument, "dt must be > 0");
  const ExpOUSaddle sp = expou_saddle(spec, dx, dt);
  // includes the one-loop Gaussian fluctuation factor; exact at dx = 0
  return -spec.sigma - 0.5 * kLog2Pi - 0.5 * std::log(dt) -
         0.5 * std::log(sp.v * sp.f_pp) - sp.f_star;
}

double expou_tail(const ModelSpec& spec, double dx, double dt) {
  return std::exp(log_expou_tail(spec, dx, dt));
}

double expou_tail_log_slope(const ModelSpec& spec, double dx, double dt) {
  validate(spec);
  if (spec.kind != ModelKind::ExpOU) fail(Errc::UnsupportedClass, "expou_tail needs kind=expou");
  const ExpOUSaddle sp = expou_saddle(spec, dx, dt);
  return -(sp.s_star / sp.v + 1.0);
}

}  // namespace svlab
