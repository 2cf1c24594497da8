#pragma once

#include <string>
#include <string_view>

#include "svlab/rational.hpp"

namespace svlab {

enum class ModelKind { Algebraic, ExpOU };

// The coupled system integrated by the lab:
//
//   Algebraic:  dX = S^gamma dW1,   dS = a (sigma - S) S^alpha dt + g S^beta dW2
//   ExpOU:      dX = e^(sigma + S) dW1,   dS = -a S dt + g dW2
//
// One ModelSpec is the single source of truth for every analytic formula and
// for the simulator.
struct ModelSpec {
  ModelKind kind = ModelKind::Algebraic;
  Rational alpha{0};
  Rational beta{0};
  Rational gamma{1, 2};
  double a = 0;      // mean-reversion rate, 1/time
  double sigma = 0;  // volatility level (ExpOU: log-volatility offset)
  double g = 0;      // noise amplitude

  static ModelSpec algebraic(Rational alpha, Rational beta, Rational gamma, double a,
                             double sigma, double g) {
    ModelSpec s;
    s.kind = ModelKind::Algebraic;
    s.alpha = alpha;
    s.beta = beta;
    s.gamma = gamma;
    s.a = a;
    s.sigma = sigma;
    s.g = g;
    return s;
  }

  static ModelSpec expou(double a, double sigma, double g) {
    ModelSpec s;
    s.kind = ModelKind::ExpOU;
    s.a = a;
    s.sigma = sigma;
    s.g = g;
    return s;
  }
};

enum class ModelClass {
  Generic,
  HestonType,          // 1 + alpha - 2 beta = 0
  GarchType,           // 2 + alpha - 2 beta = 0
  GaussianStationary,  // alpha - 2 beta = 0
  ExpOU,
};

// Classification result. `kind` is a pure function of (alpha, beta); the
// special-beta flags additionally record where the short-time saddle
// machinery must switch to the exponential substitution (they depend on
// gamma as well).
struct FamilyClass {
  ModelClass kind = ModelClass::Generic;
  Rational d1;  // 1 + alpha - 2 beta
  Rational d2;  // 2 + alpha - 2 beta
  bool special_beta_quarter = false;  // beta = 1/4 with gamma = 1/2
  bool special_beta_zero = false;     // beta = 0 with gamma = 1
};

struct ValidatedModel {
  ModelSpec spec;
  // beta = 0 with sigma < 3 g / sqrt(a): the positivity assumption behind the
  // Gaussian moment formulas is shaky (negative-S excursions not negligible).
  bool positivity_warning = false;
  // ExpOU ignores the exponent fields entirely.
  bool exponents_ignored = false;
};

ValidatedModel validate(const ModelSpec& spec);

// Additionally requires gamma in {1/2, 1} (throws UnsupportedGamma). Analytic
// operations call this; plain simulation accepts any gamma > 0.
ValidatedModel validate_for_analytics(const ModelSpec& spec);

FamilyClass classify(const ModelSpec& spec);

// Named presets: stein-stein, ou, heston, garch, geometric-ou, three-halves,
// expou. Exponents come from the preset table; a/sigma/g are left NaN for the
// caller to fill in.
ModelSpec preset(std::string_view name);

std::string model_class_name(ModelClass c);
std::string describe(const ModelSpec& spec);

}  // namespace svlab
