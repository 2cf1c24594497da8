#pragma once

#include "svlab/model.hpp"
#include "svlab/quadrature.hpp"

namespace svlab {

enum class TailForm { StretchedExponential, ExponentialBessel, PowerLaw, LambertW };

// Constants of the saddle-point tail approximation
//
//   P(dx; dt) ~ N/Z / sqrt(2 pi dt) * R_N y^prefactor_power
//               * exp(-R_1 y^stretch + R_2 sigma y^{stretch + eta_ypow})
//               * (1 + R_3 sigma y^{eta_ypow}),      y = |dx| / sqrt(dt)
//
// computed numerically from the substitution function psi rather than
// tabulated: R_1 from psi at its minimizer, R_2 from the eta-linear term,
// R_N from the Gaussian fluctuation integral, R_3 from the first-order
// eta-shift of the saddle.
struct TailAsymptote {
  TailForm form = TailForm::StretchedExponential;
  ModelClass cls = ModelClass::Generic;
  Rational gamma{1, 2};
  double stretch_exponent = 0;    // y power inside the leading exponential
  double prefactor_power = 0;     // algebraic prefactor power of y
  double eta_ypow = 0;            // y power of the subleading correction
  double r_n = 0, r_1 = 0, r_2 = 0, r_3 = 0;
  // second-order term of the eta-expansion of the saddle value; enters the
  // exponent as + r_2b sigma^2 y^{stretch + 2 eta_ypow} and pushes the
  // residual error one order down in eta
  double r_2b = 0;
  double u_star = 0, psi_star = 0, psi_pp = 0;

  // tail window: the paper-style validity gate |R_3 sigma y^eta_ypow| < 0.1
  bool in_window(double y, double sigma) const;
};

// Evaluates the short-time return density by the volatility-mixing integral
//   P(dx; dt) = Integral_0^inf s^-gamma exp(-dx^2 / (2 dt s^{2 gamma}))
//               P_S(s) ds / sqrt(2 pi dt)
// (ExpOU: kernel variance dt e^{2(sigma+s)}, P_S Gaussian). Quadrature runs
// on a log axis in full log space; use the log variant in deep tails.
class ShortTime {
 public:
  explicit ShortTime(const ModelSpec& spec, const QuadConfig& cfg = {});

  const ModelSpec& spec() const { return spec_; }
  double log_z() const { return log_z_; }

  double log_mixing_density(double dx, double dt) const;
  double mixing_density(double dx, double dt) const;

  // class-appropriate asymptote (gamma from the spec); log scale
  double log_tail_asymptote(double dx, double dt) const;

 private:
  ModelSpec spec_;
  FamilyClass fclass_;
  QuadConfig cfg_;
  double log_z_ = 0;  // normalization of P_S (0 for ExpOU, folded analytically)
};

double mixing_density(const ModelSpec& spec, double dx, double dt, const QuadConfig& cfg = {});

// Saddle constants for the generic stretched-exponential classes (and the
// gamma = 1 heston-type 2/3-stretch case). DegenerateExponent when the
// substitution denominator vanishes (e.g. the 3/2 model at gamma = 1/2).
TailAsymptote saddle_constants(const ModelSpec& spec, const Rational& gamma);

// Tail asymptotes. Heston-type at gamma = 1/2 is the exact Bessel-K closed
// form; garch-type is the exact power law (gamma = 1/2) or its leading
// large-y coefficient (gamma = 1); everything else is the saddle formula.
double tail_asymptote_gamma_half(const ModelSpec& spec, double dx, double dt);
double tail_asymptote_gamma_one(const ModelSpec& spec, double dx, double dt);
double log_tail_asymptote(const ModelSpec& spec, double dx, double dt);

// ExpOU saddle-point density. The saddle s* of the mixing exponent solves
// rho e^{-2s} = s/v + 1 (v = g^2/2a, rho = dx^2 e^{-2 sigma}/dt) and is
// expressed exactly through the Lambert function; the returned value
// includes the Gaussian fluctuation factor, so it is exact at dx = 0.
double expou_tail(const ModelSpec& spec, double dx, double dt);
double log_expou_tail(const ModelSpec& spec, double dx, double dt);

// d log P / d ln|dx| at the saddle level; approaches -(2a/g^2) ln|dx| in the
// far tail.
double expou_tail_log_slope(const ModelSpec& spec, double dx, double dt);

}  // namespace svlab
