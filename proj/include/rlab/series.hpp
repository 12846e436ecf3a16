#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "perm_prog.hpp"
#include "rational.hpp"

namespace rlab {

// Upper bound on a tail of squares. strict = true means the true tail is
// strictly below value; otherwise it may equal it.
struct TailBound {
  Rational value;
  bool strict = false;

  // Whether this bound proves the true tail is < threshold.
  bool certifies_below(const Rational& threshold) const {
    return strict ? value <= threshold : value < threshold;
  }
};

struct SeriesSpec {
  std::string name;
  std::function<Rational(index_t)> term;
  // Optional fast path: double-double approximation with relative error
  // below 2^-100 and the exact sign of the term.
  std::function<DD(index_t)> approx;
  // Optional oracle i -> bound on sum_{n >= i} a_n^2, nonincreasing in i.
  std::function<TailBound(index_t)> tail_square_sum;
  // Declared, never detected.
  bool conditionally_convergent = false;

  Rational at(index_t n) const {
    if (!term) throw Error(ErrorKind::TermUndefined, name + " has no term rule");
    return term(n);
  }
  DD approx_at(index_t n) const { return approx ? approx(n) : to_dd(at(n)); }
  bool has_tail_oracle() const { return static_cast<bool>(tail_square_sum); }
};

namespace series {

inline SeriesSpec zero() {
  SeriesSpec s;
  s.name = "zero";
  s.term = [](index_t) { return Rational(); };
  s.approx = [](index_t) { return DD{}; };
  s.tail_square_sum = [](index_t) { return TailBound{Rational(), false}; };
  return s;
}

// sum_{n >= i} 1/(n+1)^2 < 1/i for i >= 1, and < 2 at i = 0.
inline TailBound harmonic_square_tail(index_t i) {
  if (i == 0) return {Rational(2), true};
  return {Rational(mpz_class(1), mpz_class(std::to_string(i))), true};
}

// a_n = 1/(n+1).
inline SeriesSpec harmonic() {
  SeriesSpec s;
  s.name = "harmonic";
  s.term = [](index_t n) {
    return Rational(mpz_class(1), mpz_class(std::to_string(n + 1)));
  };
  s.approx = [](index_t n) { return dd_reciprocal(n + 1); };
  s.tail_square_sum = harmonic_square_tail;
  return s;
}

// a_n = (-1)^n / (n+1).
inline SeriesSpec alt_harmonic() {
  SeriesSpec s;
  s.name = "alt-harmonic";
  s.term = [](index_t n) {
    mpz_class num(n % 2 == 0 ? 1 : -1);
    return Rational(num, mpz_class(std::to_string(n + 1)));
  };
  s.approx = [](index_t n) {
    DD r = dd_reciprocal(n + 1);
    return n % 2 == 0 ? r : dd_neg(r);
  };
  s.tail_square_sum = harmonic_square_tail;
  s.conditionally_convergent = true;
  return s;
}

// a_n = 2^-n with the exact tail sum_{n >= i} 4^-n = (4/3) 4^-i.
inline SeriesSpec geometric_half() {
  SeriesSpec s;
  s.name = "geometric";
  s.term = [](index_t n) { return Rational::pow2(-static_cast<long>(n)); };
  s.tail_square_sum = [](index_t i) {
    return TailBound{Rational(4, 3) * Rational::pow2(-2 * static_cast<long>(i)), false};
  };
  return s;
}

}  // namespace series

enum class Growth { StrictlyIncreasing, Unrestricted };

// f : N -> N. Evaluations are memoized; when the declared property is
// StrictlyIncreasing every pair of evaluated points is checked.
class GrowthFunction {
 public:
  GrowthFunction() = default;
  GrowthFunction(std::string name, std::function<index_t(index_t)> rule, Growth prop)
      : m_(std::make_shared<Memo>()) {
    m_->name = std::move(name);
    m_->rule = std::move(rule);
    m_->prop = prop;
  }

  const std::string& name() const { return m_->name; }
  Growth property() const { return m_->prop; }

  index_t operator()(index_t n) const {
    std::lock_guard<std::mutex> lock(m_->mu);
    auto it = m_->seen.find(n);
    if (it != m_->seen.end()) return it->second;
    index_t v = m_->rule(n);
    auto [pos, _] = m_->seen.emplace(n, v);
    if (m_->prop == Growth::StrictlyIncreasing) {
      if (pos != m_->seen.begin() && std::prev(pos)->second >= v)
        throw Error(ErrorKind::NotIncreasing, m_->name + " not increasing at " + std::to_string(n));
      auto nx = std::next(pos);
      if (nx != m_->seen.end() && nx->second <= v)
        throw Error(ErrorKind::NotIncreasing, m_->name + " not increasing at " + std::to_string(n));
    }
    return v;
  }

 private:
  struct Memo {
    std::string name;
    std::function<index_t(index_t)> rule;
    Growth prop = Growth::Unrestricted;
    std::map<index_t, index_t> seen;
    std::mutex mu;
  };
  std::shared_ptr<Memo> m_;
};

// f(n) = a*n + b.
inline GrowthFunction linear_growth(index_t a, index_t b) {
  return GrowthFunction(
      "linear:" + std::to_string(a) + "," + std::to_string(b),
      [a, b](index_t n) {
        if (a != 0 && n > (npos - b) / a)
          throw Error(ErrorKind::Precondition, "linear growth overflows at " + std::to_string(n));
        return a * n + b;
      },
      a >= 1 ? Growth::StrictlyIncreasing : Growth::Unrestricted);
}

// Orbit 0, f(0), f(f(0)), ... computed on demand and shared between copies.
class Orbit {
 public:
  explicit Orbit(GrowthFunction f) : s_(std::make_shared<Shared>()) {
    s_->f = std::move(f);
    s_->pts.push_back(0);
  }

  // o_n
  index_t point(index_t n) const {
    std::lock_guard<std::mutex> lock(s_->mu);
    while (s_->pts.size() <= n) step();
    return s_->pts[n];
  }

  // n with o_n = k, if k is an orbit point.
  std::optional<index_t> position_of(index_t k) const {
    std::lock_guard<std::mutex> lock(s_->mu);
    while (s_->pts.back() < k) step();
    auto it = std::lower_bound(s_->pts.begin(), s_->pts.end(), k);
    if (it != s_->pts.end() && *it == k) return static_cast<index_t>(it - s_->pts.begin());
    return std::nullopt;
  }

  // Least n with o_n >= k.
  index_t first_at_or_above(index_t k) const {
    std::lock_guard<std::mutex> lock(s_->mu);
    while (s_->pts.back() < k) step();
    return static_cast<index_t>(std::lower_bound(s_->pts.begin(), s_->pts.end(), k) - s_->pts.begin());
  }

 private:
  struct Shared {
    GrowthFunction f;
    std::vector<index_t> pts;
    std::mutex mu;
  };
  void step() const {
    index_t last = s_->pts.back();
    index_t next = s_->f(last);
    if (next <= last)
      throw Error(ErrorKind::NotIncreasing,
                  "orbit stalls: f(" + std::to_string(last) + ") = " + std::to_string(next));
    s_->pts.push_back(next);
  }
  std::shared_ptr<Shared> s_;
};

// b_k = a_n when k = f^n(0), else 0.
inline SeriesSpec pad_series(const SeriesSpec& a, const GrowthFunction& f) {
  if (f.property() != Growth::StrictlyIncreasing)
    throw Error(ErrorKind::Precondition, "padding needs a strictly increasing f");
  if (f(0) == 0) throw Error(ErrorKind::Precondition, "padding needs f(0) > 0");
  Orbit orbit(f);
  SeriesSpec b;
  b.name = "padded(" + a.name + "," + f.name() + ")";
  b.term = [a, orbit](index_t k) {
    auto n = orbit.position_of(k);
    return n ? a.at(*n) : Rational();
  };
  b.approx = [a, orbit](index_t k) {
    auto n = orbit.position_of(k);
    return n ? a.approx_at(*n) : DD{};
  };
  if (a.tail_square_sum)
    b.tail_square_sum = [a, orbit](index_t i) {
      return a.tail_square_sum(orbit.first_at_or_above(i));
    };
  b.conditionally_convergent = a.conditionally_convergent;
  return b;
}

// Term n is (-1)^{signs(n)} * magnitudes(n).
inline SeriesSpec random_sign_series(const SeriesSpec& magnitudes,
                                     std::function<bool(index_t)> signs,
                                     std::string name = {}) {
  SeriesSpec s;
  s.name = name.empty() ? "signed(" + magnitudes.name + ")" : std::move(name);
  s.term = [magnitudes, signs](index_t n) {
    Rational m = magnitudes.at(n);
    if (m.sign() < 0)
      throw Error(ErrorKind::Precondition, "negative magnitude at " + std::to_string(n));
    return signs(n) ? -m : m;
  };
  s.approx = [magnitudes, signs](index_t n) {
    DD m = magnitudes.approx_at(n);
    if (m.hi < 0)
      throw Error(ErrorKind::Precondition, "negative magnitude at " + std::to_string(n));
    return signs(n) ? dd_neg(m) : m;
  };
  s.tail_square_sum = magnitudes.tail_square_sum;
  s.conditionally_convergent = true;
  return s;
}

struct RiemannTarget {
  enum class Kind { Finite, PlusInfinity, MinusInfinity };
  Kind kind = Kind::Finite;
  Rational value;
  // Schedule for the infinite targets: hold the target at +-1 until `hold`
  // opposite-sign terms have been placed, then raise it by 1/slope per
  // further opposite-sign term.
  index_t hold = 1000;
  index_t slope = 700;

  static RiemannTarget finite(Rational v) { return {Kind::Finite, std::move(v)}; }
  static RiemannTarget plus_infinity() { return {Kind::PlusInfinity, Rational()}; }
  static RiemannTarget minus_infinity() { return {Kind::MinusInfinity, Rational()}; }

  std::string label() const {
    switch (kind) {
      case Kind::Finite: return value.to_string();
      case Kind::PlusInfinity: return "plus-inf";
      case Kind::MinusInfinity: return "minus-inf";
    }
    return "?";
  }
};

namespace detail {

// Greedy rearrangement state. The running sum is tracked in double-double
// with a rigorous error bound; any comparison the bound cannot settle is
// redone exactly from the placed terms.
class RiemannGreedy {
 public:
  RiemannGreedy(SeriesSpec a, RiemannTarget t) : a_(std::move(a)), t_(std::move(t)) {
    if (t_.slope == 0) throw Error(ErrorKind::Precondition, "schedule slope must be >= 1");
    refresh_target();
  }

  void step(PermutationProg::State& st) {
    bool positive = decide_positive(st);
    index_t v = positive ? next_in_class(pos_ptr_, true) : next_in_class(neg_ptr_, false);
    DD t = a_.approx_at(v);
    double mag = std::fabs(t.hi);
    sum_ = dd_add(sum_, t);
    err_ += (std::fabs(sum_.hi) + 2 * mag) * kRel;
    st.push(v);
    if (positive) {
      ++pos_ptr_;
      ++n_pos_;
    } else {
      ++neg_ptr_;
      ++n_neg_;
    }
    if (t_.kind != RiemannTarget::Kind::Finite) refresh_target();
  }

 private:
  static constexpr double kRel = 0x1p-100;

  void refresh_target() {
    Rational next;
    switch (t_.kind) {
      case RiemannTarget::Kind::Finite:
        next = t_.value;
        break;
      case RiemannTarget::Kind::PlusInfinity: {
        index_t over = n_neg_ > t_.hold ? n_neg_ - t_.hold : 0;
        next = Rational(1) + Rational(mpz_class(std::to_string(over)),
                                      mpz_class(std::to_string(t_.slope)));
        break;
      }
      case RiemannTarget::Kind::MinusInfinity: {
        index_t over = n_pos_ > t_.hold ? n_pos_ - t_.hold : 0;
        next = Rational(-1) - Rational(mpz_class(std::to_string(over)),
                                       mpz_class(std::to_string(t_.slope)));
        break;
      }
    }
    if (!have_target_ || next != target_) {
      target_ = std::move(next);
      target_dd_ = to_dd(target_);
      have_target_ = true;
    }
  }

  // Positive (nonnegative) term next iff the sum is at or below the target.
  bool decide_positive(const PermutationProg::State& st) {
    DD d = dd_add(sum_, dd_neg(target_dd_));
    double bound = err_ + (std::fabs(target_dd_.hi) + std::fabs(sum_.hi)) * kRel;
    if (d.hi > bound) return false;
    if (d.hi < -bound) return true;
    SplitSum exact;
    for (index_t v : st.fwd) exact.add(a_.at(v));
    Rational s = exact.take();
    sum_ = to_dd(s);
    err_ = std::fabs(sum_.hi) * kRel;
    return s <= target_;
  }

  bool nonnegative(index_t n) const {
    DD t = a_.approx_at(n);
    if (t.hi != 0.0) return t.hi > 0.0;
    return a_.at(n).sign() >= 0;
  }

  index_t next_in_class(index_t& ptr, bool want_nonneg) {
    index_t scanned = 0;
    index_t limit = scan_budget_;
    while (nonnegative(ptr) != want_nonneg) {
      ++ptr;
      if (++scanned > limit)
        throw Error(ErrorKind::ExhaustedSign,
                    std::string(want_nonneg ? "nonnegative" : "negative") +
                        " terms of " + a_.name + " ran out near index " + std::to_string(ptr));
    }
    return ptr;
  }

  SeriesSpec a_;
  RiemannTarget t_;
  Rational target_;
  DD target_dd_;
  bool have_target_ = false;
  DD sum_;
  double err_ = 0.0;
  index_t pos_ptr_ = 0;
  index_t neg_ptr_ = 0;
  index_t n_pos_ = 0;
  index_t n_neg_ = 0;
  index_t scan_budget_ = default_budget();
};

}  // namespace detail

// Greedy rearrangement: at or below the target take the next unused
// nonnegative-term index, above it the next unused negative-term index.
// The returned program has at least `horizon` positions materialized and
// keeps extending on demand.
inline PermutationProg riemann_rearrange(const SeriesSpec& a, const RiemannTarget& target,
                                         index_t horizon) {
  if (!a.conditionally_convergent)
    throw Error(ErrorKind::Precondition, a.name + " is not declared conditionally convergent");
  if (horizon < 1) throw Error(ErrorKind::Precondition, "horizon must be >= 1");
  auto greedy = std::make_shared<detail::RiemannGreedy>(a, target);
  PermutationProg p("riemann:" + target.label(),
                    [greedy](PermutationProg::State& st, index_t want) {
                      while (st.size() < want) greedy->step(st);
                    });
  p.ensure(horizon);
  return p;
}

}  // namespace rlab
