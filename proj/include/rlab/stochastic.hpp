#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "perm_prog.hpp"
#include "rational.hpp"
#include "series.hpp"

namespace rlab {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Seed for trial t of an experiment seeded with `seed`.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t t) {
  return mix64(seed ^ mix64((t + 1) * kGolden));
}

// Counter-based pseudo-random bits: word w is the splitmix64 output for
// counter w, and bit n is bit (n mod 64) of word n/64. Any bit can be
// computed directly from (seed, n), so replay needs no state.
class SignSequence {
 public:
  static constexpr const char* kGeneratorId = "splitmix64-counter";

  explicit SignSequence(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::string generator_id() const { return kGeneratorId; }

  bool bit(index_t n) const {
    index_t w = n >> 6;
    if (w != cached_word_) {
      cached_word_ = w;
      cached_ = mix64(seed_ + (w + 1) * kGolden);
    }
    return (cached_ >> (n & 63)) & 1U;
  }
  bool operator()(index_t n) const { return bit(n); }

 private:
  std::uint64_t seed_;
  mutable index_t cached_word_ = npos;
  mutable std::uint64_t cached_ = 0;
};

// Neumaier's variant of compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct CauchyName {
  SeriesSpec base;
  std::vector<index_t> thresholds;   // i_0 <= i_1 <= ...
  std::vector<TailBound> tail_bounds;  // oracle bound at each i_m

  std::size_t levels() const { return thresholds.size(); }

  // phi_m = sum_{n < i_m} (-1)^{signs(n)} a_n
  double phi(std::size_t m, const SignSequence& signs) const {
    if (m >= levels()) throw Error(ErrorKind::LevelMissing, "level " + std::to_string(m));
    CompensatedSum s;
    for (index_t n = 0; n < thresholds[m]; ++n) {
      double a = base.approx_at(n).value();
      s.add(signs(n) ? -a : a);
    }
    return s.value();
  }
};

inline Rational eighth_power(std::size_t k) { return Rational::pow2(-3 * static_cast<long>(k)); }

// i_m = least i whose oracle bound certifies a tail below 1/8^{m+1}. "Least"
// is relative to the oracle, which is assumed nonincreasing, so each level is
// found by galloping from the previous one and then bisecting.
inline CauchyName compute_thresholds(const SeriesSpec& a, std::size_t levels) {
  if (!a.has_tail_oracle())
    throw Error(ErrorKind::NoOracle, a.name + " has no tail-square-sum oracle");
  CauchyName name;
  name.base = a;
  index_t lo = 0;
  for (std::size_t m = 0; m < levels; ++m) {
    Rational thr = eighth_power(m + 1);
    auto ok = [&](index_t i) { return a.tail_square_sum(i).certifies_below(thr); };
    index_t hit = lo;
    if (!ok(lo)) {
      index_t fail = lo, step = 1;
      while (true) {
        if (step > (npos >> 2))
          throw Error(ErrorKind::BudgetExceeded, "no threshold for level " + std::to_string(m));
        hit = fail + step;
        if (ok(hit)) break;
        fail = hit;
        step *= 2;
      }
      while (hit - fail > 1) {
        index_t mid = fail + (hit - fail) / 2;
        (ok(mid) ? hit : fail) = mid;
      }
    }
    name.thresholds.push_back(hit);
    name.tail_bounds.push_back(a.tail_square_sum(hit));
    lo = hit;
  }
  return name;
}

// Every stored level satisfies the bound it was chosen for.
inline bool thresholds_sound(const CauchyName& name) {
  for (std::size_t m = 0; m < name.levels(); ++m)
    if (!name.base.tail_square_sum(name.thresholds[m]).certifies_below(eighth_power(m + 1)))
      return false;
  return true;
}

struct MonteCarloReport {
  std::string operation;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  double estimate = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  bool pass = false;
  bool degenerate = false;
  std::optional<Rational> exact;        // exact-enumeration mode
  std::optional<Rational> exact_bound;
};

// P[max_k sum_{i <= k} X_i >= eps] over all 2^n sign patterns, with
// X_i = +-sigma_i and sigma_i^2 = variances[i]. Each variance must be the
// square of a rational.
inline Rational kolmogorov_exact_probability(const std::vector<Rational>& variances,
                                             const Rational& eps) {
  if (variances.size() > 20)
    throw Error(ErrorKind::Precondition, "exact enumeration limited to 20 variables");
  std::vector<Rational> sigma;
  for (const auto& v : variances) {
    if (v.sign() < 0) throw Error(ErrorKind::Precondition, "negative variance");
    if (!mpz_perfect_square_p(v.num().get_mpz_t()) || !mpz_perfect_square_p(v.den().get_mpz_t()))
      throw Error(ErrorKind::Precondition, "variance " + v.to_string() + " is not a rational square");
    sigma.emplace_back(mpz_class(sqrt(v.num())), mpz_class(sqrt(v.den())));
  }
  // Scale to integers: w_i = sigma_i * L, threshold eps * L.
  mpz_class L = 1;
  for (const auto& s : sigma) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), s.den().get_mpz_t());
  mpz_class lden = eps.den();
  std::vector<mpz_class> w;
  for (const auto& s : sigma) w.push_back(s.num() * (L / s.den()) * lden);
  mpz_class thr = eps.num() * L;  // compare S * eps.den >= eps.num * L
  const std::size_t n = w.size();
  std::uint64_t hits = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
    mpz_class s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1U) s -= w[i];
      else s += w[i];
      if (s >= thr) {
        ++hits;
        break;
      }
    }
  }
  return Rational(mpz_class(std::to_string(hits)), mpz_class(1) << static_cast<unsigned>(n));
}

inline Rational kolmogorov_bound(const std::vector<Rational>& variances, const Rational& eps) {
  Rational total;
  for (const auto& v : variances) total += v;
  return total / (eps * eps);
}

// Monte Carlo estimate of P[max partial sum >= eps]; passes within three
// sigma of the analytic bound. A bound >= 1 says nothing and is reported as
// degenerate rather than failed.
inline MonteCarloReport kolmogorov_check(const std::vector<Rational>& variances,
                                         const Rational& eps, std::uint64_t trials,
                                         std::uint64_t seed, bool exact_mode = false) {
  if (eps.sign() <= 0) throw Error(ErrorKind::Precondition, "epsilon must be positive");
  if (trials == 0 && !exact_mode) throw Error(ErrorKind::Precondition, "trials must be >= 1");
  MonteCarloReport r;
  r.operation = exact_mode ? "kolmogorov_exact" : "kolmogorov_check";
  r.seed = seed;
  r.trials = exact_mode ? 0 : trials;
  Rational bound = kolmogorov_bound(variances, eps);
  r.exact_bound = bound;
  r.bound = bound.to_double();
  r.degenerate = bound >= Rational(1);
  if (exact_mode) {
    Rational p = kolmogorov_exact_probability(variances, eps);
    r.exact = p;
    r.estimate = p.to_double();
    r.pass = r.degenerate || p <= bound;
    return r;
  }
  std::vector<double> sigma;
  for (const auto& v : variances) sigma.push_back(std::sqrt(v.to_double()));
  const double e = eps.to_double();
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    SignSequence sg(trial_seed(seed, t));
    CompensatedSum s;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      s.add(sg(i) ? -sigma[i] : sigma[i]);
      if (s.value() >= e) {
        ++hits;
        break;
      }
    }
  }
  r.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  double b = std::min(r.bound, 1.0);
  r.slack = 3.0 * std::sqrt(b * (1.0 - b) / static_cast<double>(trials));
  r.pass = r.degenerate || r.estimate <= r.bound + r.slack;
  return r;
}

// E[min(|phi_j - phi_m|, 1)] over random signs on [i_m, i_j); budget 1/2^m.
inline MonteCarloReport dmeas_pair_check(const CauchyName& name, const SignSequence& signs,
                                         std::size_t j, std::size_t m, std::uint64_t trials) {
  if (j >= name.levels() || m >= name.levels())
    throw Error(ErrorKind::LevelMissing, "levels " + std::to_string(m) + ", " + std::to_string(j) +
                                             " of " + std::to_string(name.levels()));
  if (j <= m) throw Error(ErrorKind::Precondition, "need j > m");
  if (trials == 0) throw Error(ErrorKind::Precondition, "trials must be >= 1");
  const index_t lo = name.thresholds[m], hi = name.thresholds[j];
  std::vector<double> a;
  for (index_t n = lo; n < hi; ++n) a.push_back(name.base.approx_at(n).value());
  MonteCarloReport r;
  r.operation = "dmeas_pair_check";
  r.seed = signs.seed();
  r.trials = trials;
  CompensatedSum total, total_sq;
  for (std::uint64_t t = 0; t < trials; ++t) {
    SignSequence sg(trial_seed(signs.seed(), t));
    CompensatedSum d;
    for (index_t n = lo; n < hi; ++n) d.add(sg(n) ? -a[n - lo] : a[n - lo]);
    double x = std::min(std::fabs(d.value()), 1.0);
    total.add(x);
    total_sq.add(x * x);
  }
  double mean = total.value() / static_cast<double>(trials);
  double var = std::max(0.0, total_sq.value() / static_cast<double>(trials) - mean * mean);
  r.estimate = mean;
  r.bound = std::ldexp(1.0, -static_cast<int>(m));
  r.slack = 3.0 * std::sqrt(var / static_cast<double>(trials));
  r.pass = r.estimate <= r.bound + r.slack;
  return r;
}

struct ConvergenceReport {
  std::uint64_t seeds = 0;
  std::uint64_t base_seed = 0;
  index_t h1 = 0, h2 = 0;
  double tolerance = 0.0;
  std::vector<double> drift;  // |S(h2) - S(h1)| per seed
  std::uint64_t passed = 0;
  double pass_fraction() const {
    return seeds == 0 ? 0.0 : static_cast<double>(passed) / static_cast<double>(seeds);
  }
};

// For seed s = base_seed, ..., base_seed + seeds - 1: signs from
// SignSequence(s), partial sums of the signed series (optionally read in the
// order of perm) at h1 and h2.
inline ConvergenceReport rademacher_convergence_experiment(
    const SeriesSpec& magnitudes, std::uint64_t seeds, index_t h1, index_t h2,
    const Rational& tolerance, std::optional<PermutationProg> perm = std::nullopt,
    std::uint64_t base_seed = 0) {
  if (!magnitudes.has_tail_oracle())
    throw Error(ErrorKind::NoOracle, magnitudes.name + " has no tail oracle to justify the tolerance");
  if (h2 <= h1) throw Error(ErrorKind::Precondition, "need h2 > h1");
  std::vector<index_t> order;
  if (perm) order = perm->prefix(h2);
  index_t top = h2;
  for (index_t v : order) top = std::max(top, v + 1);
  std::vector<double> mag(top);
  for (index_t n = 0; n < top; ++n) {
    mag[n] = magnitudes.approx_at(n).value();
    if (mag[n] < 0) throw Error(ErrorKind::Precondition, "negative magnitude at " + std::to_string(n));
  }
  ConvergenceReport r;
  r.seeds = seeds;
  r.base_seed = base_seed;
  r.h1 = h1;
  r.h2 = h2;
  r.tolerance = tolerance.to_double();
  for (std::uint64_t k = 0; k < seeds; ++k) {
    SignSequence sg(base_seed + k);
    CompensatedSum s;
    double s1 = 0.0;
    for (index_t n = 0; n < h2; ++n) {
      if (n == h1) s1 = s.value();
      index_t idx = perm ? order[n] : n;
      s.add(sg(idx) ? -mag[idx] : mag[idx]);
    }
    double d = std::fabs(s.value() - s1);
    r.drift.push_back(d);
    if (d <= r.tolerance) ++r.passed;
  }
  return r;
}

}  // namespace rlab
