#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ftl/errors.hpp"

namespace ftl {

using i128 = __int128;
using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// Narrow a 128-bit intermediate back to int64 or throw overflow_error.
int64_t checked_narrow(i128 v);
int64_t checked_mul(int64_t a, int64_t b);
int64_t checked_add(int64_t a, int64_t b);
int64_t ipow(int64_t base, int exp);
int64_t lcm64(int64_t a, int64_t b);

// Exact rational with int64 numerator and positive int64 denominator,
// always reduced. Arithmetic goes through 128-bit intermediates.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(int64_t num);  // NOLINT(google-explicit-constructor)
  Rational(int64_t num, int64_t den);

  int64_t num() const { return num_; }
  int64_t den() const { return den_; }

  Rational operator-() const;
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  long double to_long_double() const {
    return static_cast<long double>(num_) / static_cast<long double>(den_);
  }
  BigRational to_big() const { return BigRational(num_, den_); }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

  // "p/q", or "p" when the denominator is 1.
  std::string str() const;
  // Accepts "p", "p/q", "-p/q" with optional surrounding spaces.
  static Rational parse(const std::string& text);

 private:
  static Rational from_wide(i128 num, i128 den);
  int64_t num_ = 0;
  int64_t den_ = 1;
};

Rational abs(const Rational& r);
Rational floor_div(const Rational& r);  // floor as an integer-valued Rational
Rational rpow(const Rational& base, int exp);

using Point2 = std::array<Rational, 2>;

inline Point2 operator+(const Point2& a, const Point2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Point2 operator-(const Point2& a, const Point2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Point2 operator*(const Rational& s, const Point2& a) { return {s * a[0], s * a[1]}; }
Rational dist2(const Point2& a, const Point2& b);
std::string to_string(const Point2& p);

// Exact comparison of sqrt(a_sq) against a + b*sqrt(c) style bounds is not
// needed; bounds with irrational factors are compared in long double with
// the slack stated at the call site.
bool sqrt_le(const BigRational& a_sq, long double bound);
double big_to_double(const BigRational& r);

}  // namespace ftl
