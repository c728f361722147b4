#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <stdexcept>

#include "fpa/rational.hpp"

using fpa::Rational;

TEST_CASE("construction normalizes sign and gcd") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(-2, 4) == Rational(1, -2));
  CHECK(Rational(0, 7) == Rational(0));
  CHECK(Rational(-3, -9) == Rational(1, 3));
  CHECK(Rational(5).num() == 5);
  CHECK(Rational(5).den() == 1);
}

TEST_CASE("zero denominator rejected") {
  CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
}

TEST_CASE("arithmetic") {
  CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
  CHECK(Rational(1, 2) - Rational(1, 3) == Rational(1, 6));
  CHECK(Rational(2, 3) * Rational(3, 4) == Rational(1, 2));
  CHECK(Rational(2, 3) / Rational(4, 3) == Rational(1, 2));
  CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);

  Rational acc(0);
  for (int i = 0; i < 12; ++i) acc += Rational(1, 12);
  CHECK(acc == Rational(1));
}

TEST_CASE("comparisons use cross multiplication") {
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 2) < Rational(1, 3));
  CHECK(Rational(7, 3) > Rational(2));
  CHECK(Rational(4, 6) <= Rational(2, 3));
  CHECK(Rational(4, 6) >= Rational(2, 3));
  // Large values that would overflow naive 64-bit cross products.
  Rational big(3037000499LL, 3037000500LL);
  Rational big2(3037000498LL, 3037000499LL);
  CHECK(big2 < big);
}

TEST_CASE("overflow in results is detected") {
  Rational huge(INT64_MAX, 1);
  CHECK_THROWS_AS(huge + huge, std::overflow_error);
  CHECK_THROWS_AS(huge * Rational(2), std::overflow_error);
}

TEST_CASE("float view and printing") {
  CHECK(Rational(1, 2).to_double() == doctest::Approx(0.5));
  CHECK(Rational(32, 9).to_double() == doctest::Approx(3.5555555556));
  CHECK(Rational(3, 2).str() == "3/2");
  CHECK(Rational(4).str() == "4");
  CHECK(Rational(-1, 2).str() == "-1/2");
}
