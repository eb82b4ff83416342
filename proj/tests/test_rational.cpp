#include <catch_amalgamated.hpp>

#include <random>

#include "ftl/rational.hpp"

using namespace ftl;

namespace {

BigRational big(int64_t p, int64_t q) { return BigRational(p, q); }

}  // namespace

TEST_CASE("rational arithmetic agrees with arbitrary precision", "[rational]") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int64_t> num(-100000, 100000), den(1, 100000);
  for (int it = 0; it < 2000; ++it) {
    int64_t a = num(rng), b = den(rng), c = num(rng), d = den(rng);
    Rational x(a, b), y(c, d);
    BigRational bx = big(a, b), by = big(c, d);
    CHECK((x + y).to_big() == bx + by);
    CHECK((x - y).to_big() == bx - by);
    CHECK((x * y).to_big() == bx * by);
    if (c != 0) CHECK((x / y).to_big() == bx / by);
    CHECK((x < y) == (bx < by));
    CHECK((x == y) == (bx == by));
  }
}

TEST_CASE("rationals are stored reduced with a positive denominator", "[rational]") {
  Rational r(6, -4);
  CHECK(r.num() == -3);
  CHECK(r.den() == 2);
  CHECK(Rational(0, 7).den() == 1);
  CHECK_THROWS_AS(Rational(1, 0), domain_error);
  CHECK_THROWS_AS(Rational(1) / Rational(0), domain_error);
}

TEST_CASE("parse and str round trip", "[rational]") {
  for (const char* s : {"0", "5", "-5", "3/4", "-7/9", "1/1048576"}) CHECK(Rational::parse(s).str() == s);
  CHECK(Rational::parse(" 2/4 ") == Rational(1, 2));
  for (const char* bad : {"", "x", "1/", "/2", "1/0", "1.5", "2/3/4"})
    CHECK_THROWS_AS(Rational::parse(bad), precondition_error);
}

TEST_CASE("overflow is reported instead of wrapping", "[rational]") {
  Rational big_value(INT64_MAX);
  CHECK_THROWS_AS(big_value * Rational(2), overflow_error);
  CHECK_THROWS_AS(big_value + Rational(1), overflow_error);
  CHECK_THROWS_AS(ipow(10, 19), overflow_error);
  CHECK(ipow(3, 4) == 81);
}

TEST_CASE("floor, powers and distances", "[rational]") {
  CHECK(floor_div(Rational(7, 2)) == Rational(3));
  CHECK(floor_div(Rational(-7, 2)) == Rational(-4));
  CHECK(floor_div(Rational(4)) == Rational(4));
  CHECK(rpow(Rational(2, 3), 3) == Rational(8, 27));
  CHECK(rpow(Rational(2, 3), -2) == Rational(9, 4));
  CHECK(rpow(Rational(5), 0) == Rational(1));
  Point2 a{Rational(0), Rational(0)}, b{Rational(3), Rational(4)};
  CHECK(dist2(a, b) == Rational(25));
}

TEST_CASE("sqrt comparison against a floating bound", "[rational]") {
  CHECK(sqrt_le(BigRational(4), 2.0L));
  CHECK(sqrt_le(BigRational(399, 100), 2.0L));
  CHECK_FALSE(sqrt_le(BigRational(401, 100), 2.0L));
  CHECK(big_to_double(BigRational(1, 3)) == Catch::Approx(1.0 / 3.0));
}
