#include "svlab/model.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace svlab {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonFiniteParameter: return "NonFiniteParameter";
    case Errc::NonPositiveRate: return "NonPositiveRate";
    case Errc::UnsupportedGamma: return "UnsupportedGamma";
    case Errc::UnknownPreset: return "UnknownPreset";
    case Errc::MemoryCapExceeded: return "MemoryCapExceeded";
    case Errc::LagNotOnGrid: return "LagNotOnGrid";
    case Errc::InsufficientHorizon: return "InsufficientHorizon";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::ChainDoesNotClose: return "ChainDoesNotClose";
    case Errc::ToleranceNotMet: return "ToleranceNotMet";
    case Errc::UnsupportedExponents: return "UnsupportedExponents";
    case Errc::NotGarch: return "NotGarch";
    case Errc::DivergentMoment: return "DivergentMoment";
    case Errc::NonPositiveArgument: return "NonPositiveArgument";
    case Errc::NotNormalizable: return "NotNormalizable";
    case Errc::QuadratureFailure: return "QuadratureFailure";
    case Errc::UnnormalizedInput: return "UnnormalizedInput";
    case Errc::MomentDiverges: return "MomentDiverges";
    case Errc::DegenerateExponent: return "DegenerateExponent";
    case Errc::UnsupportedClass: return "UnsupportedClass";
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::MinimizationFailure: return "MinimizationFailure";
    case Errc::UnsupportedOrder: return "UnsupportedOrder";
    case Errc::NonPositiveResidual: return "NonPositiveResidual";
    case Errc::InsufficientTail: return "InsufficientTail";
    case Errc::DegenerateSample: return "DegenerateSample";
    case Errc::EmptySample: return "EmptySample";
    case Errc::NonMonotoneCdf: return "NonMonotoneCdf";
  }
  return "UnknownError";
}

bool errc_is_usage(Errc c) {
  switch (c) {
    case Errc::NonFiniteParameter:
    case Errc::NonPositiveRate:
    case Errc::UnknownPreset:
    case Errc::InvalidConfig:
    case Errc::MemoryCapExceeded:
      return true;
    default:
      return false;
  }
}

Rational parse_rational(const std::string& text) {
  if (text.empty()) fail(Errc::InvalidConfig, "empty rational");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const std::string p = text.substr(0, slash);
    const std::string q = text.substr(slash + 1);
    try {
      return Rational(std::stoll(p), std::stoll(q));
    } catch (const std::exception&) {
      fail(Errc::InvalidConfig, "cannot parse rational '" + text + "'");
    }
  }
  // integer or decimal
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) fail(Errc::InvalidConfig, "cannot parse rational '" + text + "'");
    if (!std::isfinite(v)) fail(Errc::NonFiniteParameter, "non-finite exponent '" + text + "'");
    // continued-fraction search for an exact small-denominator representation
    for (std::int64_t den = 1; den <= 1000; ++den) {
      const double n = v * den;
      const double r = std::round(n);
      if (std::abs(n - r) < 1e-9 * std::max(1.0, std::abs(n)))
        return Rational(static_cast<std::int64_t>(r), den);
    }
    fail(Errc::InvalidConfig, "exponent '" + text + "' is not a small rational");
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(Errc::InvalidConfig, "cannot parse rational '" + text + "'");
  }
}

ValidatedModel validate(const ModelSpec& spec) {
  if (!std::isfinite(spec.a) || !std::isfinite(spec.sigma) || !std::isfinite(spec.g))
    fail(Errc::NonFiniteParameter, "a, sigma, g must be finite");
  if (!(spec.a > 0)) fail(Errc::NonPositiveRate, "mean-reversion rate a must be > 0");
  // g = 0 is the deterministic-drift degenerate case; simulation accepts it,
  // the analytic layer (which divides by g^2) does not.
  if (spec.g < 0) fail(Errc::NonPositiveRate, "noise amplitude g must be >= 0");
  if (spec.sigma < 0) fail(Errc::NonPositiveRate, "volatility level sigma must be >= 0");

  ValidatedModel out;
  out.spec = spec;
  out.exponents_ignored = (spec.kind == ModelKind::ExpOU);
  if (spec.kind == ModelKind::Algebraic) {
    if (!(spec.gamma.value() > 0)) fail(Errc::NonPositiveRate, "gamma must be > 0");
    if (spec.beta.is(0) && spec.sigma < 3.0 * spec.g / std::sqrt(spec.a))
      out.positivity_warning = true;
  }
  return out;
}

ValidatedModel validate_for_analytics(const ModelSpec& spec) {
  ValidatedModel v = validate(spec);
  if (!(spec.g > 0)) fail(Errc::NonPositiveRate, "analytic operations need g > 0");
  if (spec.kind == ModelKind::Algebraic && !spec.gamma.is(1, 2) && !spec.gamma.is(1))
    fail(Errc::UnsupportedGamma,
         "analytic operations support gamma in {1/2, 1}, got " + spec.gamma.str());
  return v;
}

FamilyClass classify(const ModelSpec& spec) {
  FamilyClass fc;
  fc.d1 = Rational(1) + spec.alpha - 2 * spec.beta;
  fc.d2 = Rational(2) + spec.alpha - 2 * spec.beta;
  if (spec.kind == ModelKind::ExpOU) {
    fc.kind = ModelClass::ExpOU;
    return fc;
  }
  if (fc.d1.is(0))
    fc.kind = ModelClass::HestonType;
  else if (fc.d2.is(0))
    fc.kind = ModelClass::GarchType;
  else if ((spec.alpha - 2 * spec.beta).is(0))
    fc.kind = ModelClass::GaussianStationary;
  else
    fc.kind = ModelClass::Generic;
  fc.special_beta_quarter = spec.beta.is(1, 4) && spec.gamma.is(1, 2);
  fc.special_beta_zero = spec.beta.is(0) && spec.gamma.is(1);
  return fc;
}

ModelSpec preset(std::string_view name) {
  const double nan = std::nan("");
  auto alg = [&](Rational al, Rational be, Rational ga) {
    ModelSpec s;
    s.kind = ModelKind::Algebraic;
    s.alpha = al;
    s.beta = be;
    s.gamma = ga;
    s.a = s.sigma = s.g = nan;
    return s;
  };
  if (name == "stein-stein") return alg(Rational(0), Rational(0), Rational(1));
  if (name == "ou") return alg(Rational(0), Rational(0), Rational(1, 2));
  if (name == "heston") return alg(Rational(0), Rational(1, 2), Rational(1, 2));
  if (name == "garch") return alg(Rational(0), Rational(1), Rational(1, 2));
  if (name == "geometric-ou") return alg(Rational(1), Rational(1), Rational(1, 2));
  if (name == "three-halves") return alg(Rational(0), Rational(3, 2), Rational(1, 2));
  if (name == "expou") {
    ModelSpec s;
    s.kind = ModelKind::ExpOU;
    s.a = s.sigma = s.g = nan;
    return s;
  }
  fail(Errc::UnknownPreset, "unknown preset '" + std::string(name) + "'");
}

std::string model_class_name(ModelClass c) {
  switch (c) {
    case ModelClass::Generic: return "generic";
    case ModelClass::HestonType: return "heston-type";
    case ModelClass::GarchType: return "garch-type";
    case ModelClass::GaussianStationary: return "gaussian-stationary";
    case ModelClass::ExpOU: return "expou";
  }
  return "?";
}

std::string describe(const ModelSpec& spec) {
  std::ostringstream os;
  if (spec.kind == ModelKind::ExpOU) {
    os << "expou";
  } else {
    os << "algebraic alpha=" << spec.alpha.str() << " beta=" << spec.beta.str()
       << " gamma=" << spec.gamma.str();
  }
  os << " a=" << spec.a << " sigma=" << spec.sigma << " g=" << spec.g;
  return os.str();
}

}  // namespace svlab
