#pragma once

#include <gmpxx.h>

#include <cmath>
#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace rlab {

// Exact rational, always in lowest terms with a positive denominator.
class Rational {
 public:
  Rational() = default;
  Rational(long v) : q_(v) {}  // NOLINT(implicit)
  Rational(int v) : q_(v) {}   // NOLINT(implicit)
  Rational(long num, unsigned long den) {
    if (den == 0) throw Error(ErrorKind::Precondition, "zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
  }
  Rational(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw Error(ErrorKind::Precondition, "zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
  }
  explicit Rational(const mpq_class& q) : q_(q) { q_.canonicalize(); }
  explicit Rational(mpq_class&& q) : q_(std::move(q)) { q_.canonicalize(); }

  // Accepts "a", "-a", "a/b". Throws Parse on anything else.
  static Rational parse(std::string_view s) {
    std::string t(s);
    auto slash = t.find('/');
    auto valid_int = [](const std::string& x, bool allow_sign) {
      if (x.empty()) return false;
      size_t i = 0;
      if (allow_sign && (x[0] == '-' || x[0] == '+')) i = 1;
      if (i == x.size()) return false;
      for (; i < x.size(); ++i)
        if (x[i] < '0' || x[i] > '9') return false;
      return true;
    };
    std::string num = t.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : t.substr(slash + 1);
    if (!valid_int(num, true) || !valid_int(den, false))
      throw Error(ErrorKind::Parse, "not a rational: '" + t + "'");
    if (num[0] == '+') num.erase(0, 1);
    mpz_class n(num), d(den);
    if (d == 0) throw Error(ErrorKind::Parse, "zero denominator in '" + t + "'");
    return Rational(n, d);
  }

  static Rational pow2(long e) {
    mpq_class q(1);
    if (e >= 0)
      mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
    else
      mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
    return Rational(std::move(q));
  }

  const mpz_class& num() const { return q_.get_num(); }
  const mpz_class& den() const { return q_.get_den(); }
  const mpq_class& mpq() const { return q_; }
  int sign() const { return sgn(q_); }
  bool is_zero() const { return sign() == 0; }

  double to_double() const { return q_.get_d(); }
  std::string to_string() const { return q_.get_str(); }

  Rational abs() const { return Rational(mpq_class(::abs(q_))); }

  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw Error(ErrorKind::Precondition, "division by zero");
    q_ /= o.q_;
    return *this;
  }
  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.q_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }
  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.to_string();
  }

 private:
  mpq_class q_;
};

// Sum of many rationals by binary splitting: numerators and denominators are
// combined pairwise without reduction and the gcd is taken once at the end.
// Far cheaper than term-by-term mpq addition when the denominators are
// pairwise mostly coprime (harmonic-like series).
class SplitSum {
 public:
  void add(const Rational& r) {
    nums_.push_back(r.num());
    dens_.push_back(r.den());
  }
  void add(long sign_num, unsigned long den) {
    nums_.emplace_back(sign_num);
    dens_.emplace_back(den);
  }
  size_t size() const { return nums_.size(); }
  bool empty() const { return nums_.empty(); }

  // Consumes the accumulated terms.
  Rational take() {
    if (nums_.empty()) return Rational();
    size_t n = nums_.size();
    // Bottom-up pairwise merge in place.
    for (size_t step = 1; step < n; step *= 2) {
      for (size_t i = 0; i + step < n; i += 2 * step) {
        size_t j = i + step;
        nums_[i] *= dens_[j];
        nums_[j] *= dens_[i];
        nums_[i] += nums_[j];
        dens_[i] *= dens_[j];
        nums_[j] = 0;
        dens_[j] = 0;
      }
    }
    Rational out(nums_[0], dens_[0]);
    nums_.clear();
    dens_.clear();
    return out;
  }

 private:
  std::vector<mpz_class> nums_;
  std::vector<mpz_class> dens_;
};

// Unevaluated double-double value hi + lo with |lo| <= ulp(hi)/2.
struct DD {
  double hi = 0.0;
  double lo = 0.0;
  double value() const { return hi + lo; }
};

inline DD two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline DD dd_add(DD a, DD b) {
  DD s = two_sum(a.hi, b.hi);
  DD t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return two_sum(s.hi, s.lo);
}

inline DD dd_neg(DD a) { return {-a.hi, -a.lo}; }

// Double-double approximation of a rational, relative error below 2^-100.
inline DD to_dd(const Rational& r) {
  double hi = r.to_double();
  if (!std::isfinite(hi)) return {hi, 0.0};
  mpq_class rest = r.mpq() - mpq_class(hi);
  return two_sum(hi, rest.get_d());
}

// 1/d as double-double for d < 2^53.
inline DD dd_reciprocal(std::uint64_t d) {
  double dd = static_cast<double>(d);
  double hi = 1.0 / dd;
  double lo = std::fma(-hi, dd, 1.0) / dd;
  return two_sum(hi, lo);
}

}  // namespace rlab
