#pragma once

#include <stdexcept>
#include <string>

namespace svlab {

// Every failure mode has a stable name so the CLI (and tests) can report
// which module-level contract was violated.
enum class Errc {
  // model
  NonFiniteParameter,
  NonPositiveRate,
  UnsupportedGamma,
  UnknownPreset,
  // sde
  MemoryCapExceeded,
  LagNotOnGrid,
  InsufficientHorizon,
  InvalidConfig,
  // moments
  ChainDoesNotClose,
  ToleranceNotMet,
  UnsupportedExponents,
  NotGarch,
  DivergentMoment,
  // density
  NonPositiveArgument,
  NotNormalizable,
  QuadratureFailure,
  UnnormalizedInput,
  MomentDiverges,
  // short-time
  DegenerateExponent,
  UnsupportedClass,
  OutOfDomain,
  MinimizationFailure,
  // acf
  UnsupportedOrder,
  NonPositiveResidual,
  // estimators
  InsufficientTail,
  DegenerateSample,
  EmptySample,
  NonMonotoneCdf,
};

const char* errc_name(Errc c);

// Whether the error maps to a CLI usage failure (exit 1) or a numerical /
// analytic failure (exit 2).
bool errc_is_usage(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace svlab
