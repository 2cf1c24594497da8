#include "doctest.h"

#include <cmath>

#include "svlab/model.hpp"

using namespace svlab;

TEST_CASE("rational arithmetic and parsing") {
  CHECK(Rational(1, 2) == Rational(2, 4));
  CHECK((Rational(1) + Rational(1, 2) - 2 * Rational(3, 4)).is(0));
  CHECK(parse_rational("1/2").is(1, 2));
  CHECK(parse_rational("3").is(3));
  CHECK(parse_rational("0.25").is(1, 4));
  CHECK(parse_rational("1.5").is(3, 2));
  CHECK(parse_rational("-1/2").is(-1, 2));
  CHECK_THROWS_AS(parse_rational("abc"), Error);
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
}

TEST_CASE("validate accepts good specs and flags the positivity regime") {
  auto spec = ModelSpec::algebraic(Rational(0), Rational(0), Rational(1), 1.0, 2.0, 0.5);
  auto v = validate(spec);
  CHECK(!v.positivity_warning);  // sigma = 2 >= 3 g / sqrt(a) = 1.5

  spec.sigma = 0.1;
  spec.g = 1.0;
  v = validate(spec);
  CHECK(v.positivity_warning);  // 0.1 < 3

  spec.beta = Rational(1, 2);
  v = validate(spec);
  CHECK(!v.positivity_warning);  // warning applies to beta = 0 only
}

TEST_CASE("validate rejects bad parameters") {
  auto spec = ModelSpec::algebraic(Rational(0), Rational(0), Rational(1), -1.0, 1.0, 0.5);
  CHECK_THROWS_WITH_AS(validate(spec), doctest::Contains("NonPositiveRate"), Error);
  spec.a = std::nan("");
  CHECK_THROWS_WITH_AS(validate(spec), doctest::Contains("NonFiniteParameter"), Error);
  spec.a = 1.0;
  spec.g = -0.5;
  CHECK_THROWS_AS(validate(spec), Error);
}

TEST_CASE("gamma gate applies to analytic operations only") {
  auto spec = ModelSpec::algebraic(Rational(0), Rational(0), Rational(1, 3), 1.0, 1.0, 0.5);
  CHECK_NOTHROW(validate(spec));
  CHECK_THROWS_WITH_AS(validate_for_analytics(spec), doctest::Contains("UnsupportedGamma"),
                       Error);
}

TEST_CASE("expou ignores exponent fields") {
  auto spec = ModelSpec::expou(1.0, 0.5, 0.4);
  const auto v = validate(spec);
  CHECK(v.exponents_ignored);
}

TEST_CASE("classification by exact discriminants") {
  auto mk = [](int an, int ad, int bn, int bd) {
    return ModelSpec::algebraic(Rational(an, ad), Rational(bn, bd), Rational(1, 2), 1, 1, 0.5);
  };
  CHECK(classify(mk(0, 1, 1, 2)).kind == ModelClass::HestonType);
  CHECK(classify(mk(0, 1, 1, 1)).kind == ModelClass::GarchType);
  CHECK(classify(mk(1, 1, 1, 1)).kind == ModelClass::HestonType);  // d1 = 1 + 1 - 2 = 0
  CHECK(classify(mk(0, 1, 0, 1)).kind == ModelClass::GaussianStationary);
  CHECK(classify(mk(1, 1, 1, 2)).kind == ModelClass::GaussianStationary);  // alpha = 2 beta
  CHECK(classify(mk(0, 1, 3, 2)).kind == ModelClass::Generic);
  CHECK(classify(ModelSpec::expou(1, 0, 1)).kind == ModelClass::ExpOU);

  // discriminants are stored exactly
  const FamilyClass fc = classify(mk(0, 1, 1, 2));
  CHECK(fc.d1.is(0));
  CHECK(fc.d2.is(1));
}

TEST_CASE("the three special classes are mutually exclusive") {
  for (int an = -2; an <= 2; ++an)
    for (int bn = -2; bn <= 4; ++bn) {
      const auto spec =
          ModelSpec::algebraic(Rational(an, 2), Rational(bn, 4), Rational(1, 2), 1, 1, 0.5);
      const FamilyClass fc = classify(spec);
      const int hits = int(fc.d1.is(0)) + int(fc.d2.is(0)) +
                       int((spec.alpha - 2 * spec.beta).is(0));
      CHECK(hits <= 1);
      if (hits == 0) CHECK(fc.kind == ModelClass::Generic);
    }
}

TEST_CASE("special-beta flags track gamma") {
  auto q = ModelSpec::algebraic(Rational(0), Rational(1, 4), Rational(1, 2), 1, 1, 0.5);
  CHECK(classify(q).special_beta_quarter);
  q.gamma = Rational(1);
  CHECK(!classify(q).special_beta_quarter);

  auto z = ModelSpec::algebraic(Rational(0), Rational(0), Rational(1), 1, 1, 0.5);
  CHECK(classify(z).special_beta_zero);
  CHECK(classify(z).kind == ModelClass::GaussianStationary);
}

TEST_CASE("preset table") {
  auto h = preset("heston");
  CHECK(h.alpha.is(0));
  CHECK(h.beta.is(1, 2));
  CHECK(h.gamma.is(1, 2));
  CHECK(std::isnan(h.a));

  auto ss = preset("stein-stein");
  CHECK(ss.alpha.is(0));
  CHECK(ss.beta.is(0));
  CHECK(ss.gamma.is(1));

  auto th = preset("three-halves");
  CHECK(th.beta.is(3, 2));
  CHECK(th.gamma.is(1, 2));

  CHECK(preset("expou").kind == ModelKind::ExpOU);
  CHECK_THROWS_WITH_AS(preset("cir"), doctest::Contains("UnknownPreset"), Error);

  // preset -> classify round trip
  auto cls = [](const char* name) {
    auto s = preset(name);
    s.a = 1;
    s.sigma = 1;
    s.g = 0.5;
    return classify(s).kind;
  };
  CHECK(cls("heston") == ModelClass::HestonType);
  CHECK(cls("garch") == ModelClass::GarchType);
  CHECK(cls("stein-stein") == ModelClass::GaussianStationary);
  CHECK(cls("ou") == ModelClass::GaussianStationary);
  CHECK(cls("geometric-ou") == ModelClass::HestonType);
  CHECK(cls("three-halves") == ModelClass::Generic);
}
