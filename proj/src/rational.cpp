#include "ftl/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

namespace ftl {

namespace {

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

int64_t checked_narrow(i128 v) {
  if (v > std::numeric_limits<int64_t>::max() || v < std::numeric_limits<int64_t>::min()) {
    throw overflow_error("exact arithmetic exceeded int64 range");
  }
  return static_cast<int64_t>(v);
}

int64_t checked_mul(int64_t a, int64_t b) { return checked_narrow(static_cast<i128>(a) * b); }
int64_t checked_add(int64_t a, int64_t b) { return checked_narrow(static_cast<i128>(a) + b); }

int64_t ipow(int64_t base, int exp) {
  if (exp < 0) throw precondition_error("ipow: negative exponent");
  int64_t r = 1;
  for (int i = 0; i < exp; ++i) r = checked_mul(r, base);
  return r;
}

int64_t lcm64(int64_t a, int64_t b) {
  if (a == 0 || b == 0) return 0;
  int64_t g = std::gcd(a, b);
  return checked_mul(a / g, b);
}

Rational::Rational(int64_t num) : num_(num), den_(1) {}

Rational::Rational(int64_t num, int64_t den) {
  if (den == 0) throw domain_error("rational with zero denominator");
  *this = from_wide(num, den);
}

Rational Rational::from_wide(i128 num, i128 den) {
  if (den == 0) throw domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  Rational r;
  r.num_ = checked_narrow(num);
  r.den_ = checked_narrow(den);
  return r;
}

Rational Rational::operator-() const {
  Rational r;
  r.num_ = checked_narrow(-static_cast<i128>(num_));
  r.den_ = den_;
  return r;
}

Rational operator+(const Rational& a, const Rational& b) {
  if (a.den_ == b.den_) return Rational::from_wide(static_cast<i128>(a.num_) + b.num_, a.den_);
  int64_t g = std::gcd(a.den_, b.den_);
  i128 da = a.den_ / g;
  i128 db = b.den_ / g;
  return Rational::from_wide(a.num_ * db + b.num_ * da, da * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  int64_t g1 = std::gcd(a.num_, b.den_);
  int64_t g2 = std::gcd(b.num_, a.den_);
  if (g1 == 0) g1 = 1;
  if (g2 == 0) g2 = 1;
  i128 n = static_cast<i128>(a.num_ / g1) * (b.num_ / g2);
  i128 d = static_cast<i128>(a.den_ / g2) * (b.den_ / g1);
  return Rational::from_wide(n, d);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw domain_error("rational division by zero");
  return Rational::from_wide(static_cast<i128>(a.num_) * b.den_, static_cast<i128>(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  i128 l = static_cast<i128>(a.num_) * b.den_;
  i128 r = static_cast<i128>(b.num_) * a.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  auto parse_int = [&](const std::string& part) -> int64_t {
    if (part.empty()) throw precondition_error("malformed rational: '" + text + "'");
    size_t pos = 0;
    int64_t v = 0;
    try {
      v = std::stoll(part, &pos);
    } catch (const std::exception&) {
      throw precondition_error("malformed rational: '" + text + "'");
    }
    if (pos != part.size()) throw precondition_error("malformed rational: '" + text + "'");
    return v;
  };
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(parse_int(s));
  int64_t d = parse_int(s.substr(slash + 1));
  if (d == 0) throw precondition_error("malformed rational (zero denominator): '" + text + "'");
  return Rational(parse_int(s.substr(0, slash)), d);
}

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

Rational floor_div(const Rational& r) {
  int64_t q = r.num() / r.den();
  if (r.num() % r.den() != 0 && r.num() < 0) --q;
  return Rational(q);
}

Rational rpow(const Rational& base, int exp) {
  Rational r(1);
  if (exp >= 0) {
    for (int i = 0; i < exp; ++i) r *= base;
  } else {
    for (int i = 0; i < -exp; ++i) r /= base;
  }
  return r;
}

Rational dist2(const Point2& a, const Point2& b) {
  Rational dx = a[0] - b[0];
  Rational dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

std::string to_string(const Point2& p) { return "(" + p[0].str() + ", " + p[1].str() + ")"; }

double big_to_double(const BigRational& r) { return static_cast<double>(r); }

bool sqrt_le(const BigRational& a_sq, long double bound) {
  if (bound < 0) return false;
  return static_cast<long double>(a_sq) <= bound * bound;
}

}  // namespace ftl
