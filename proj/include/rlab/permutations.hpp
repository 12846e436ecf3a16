#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "partial_sums.hpp"
#include "perm_prog.hpp"
#include "rational.hpp"
#include "series.hpp"

namespace rlab {

struct Agreement {
  int target = 0;        // 0: first permutation argument, 1: second
  index_t index = 0;     // {q(n) : n <= index} = {target(n) : n <= index}
  std::uint64_t stage = 0;
};

namespace detail {

// Shared state of a mixer. Odd stages agree with `odd`, even stages with
// `even`. Each stage must fix at least one new position, so the agreement
// index of a stage is at least the current domain length L; without that the
// construction can stall at index 0 forever (when p(0) = 0).
struct MixerState {
  PermutationProg even;
  PermutationProg odd;
  std::string even_label;
  std::string odd_label;
  Budget budget;
  std::vector<Agreement> agreements;
  std::uint64_t stages = 0;
  // Per target: q values whose inverse under that target is not yet folded
  // into max_inv, and the largest agreement index realized so far.
  index_t max_inv[2] = {0, 0};
  index_t folded[2] = {0, 0};
  index_t done_upto[2] = {0, 0};  // target positions < this are in range(q)

  void run_stage(PermutationProg::State& q) {
    ++stages;
    const int which = stages % 2 == 1 ? 1 : 0;
    PermutationProg& t = which == 1 ? odd : even;
    const index_t L = q.size();

    for (index_t k = folded[which]; k < L; ++k)
      max_inv[which] = std::max(max_inv[which], t.inverse(q.fwd[k], budget));
    folded[which] = L;
    const index_t i = std::max(L, L == 0 ? 0 : max_inv[which]);

    std::vector<index_t> missing;
    t.ensure(i + 1);
    for (index_t m = done_upto[which]; m <= i; ++m) {
      index_t v = t(m);
      if (!q.in_range(v)) missing.push_back(v);
    }
    done_upto[which] = i + 1;
    std::sort(missing.begin(), missing.end());
    for (index_t v : missing) q.push(v);
    if (q.size() != i + 1)
      throw Error(ErrorKind::Precondition, "mixer stage lost bijectivity");
    // Values just added have target-inverse <= i by construction.
    max_inv[which] = std::max(max_inv[which], i);
    folded[which] = q.size();
    q.record(which == 1 ? odd_label : even_label, L, i);
    agreements.push_back({which, i, stages});
  }
};

inline PermutationProg make_mixer(std::shared_ptr<MixerState> ms, std::string name,
                                  std::size_t rounds) {
  PermutationProg q(std::move(name), [ms](PermutationProg::State& st, index_t want) {
    while (st.size() < want) ms->run_stage(st);
  });
  // Eager stages; further stages run lazily on demand.
  while (ms->stages < 2 * rounds) q.ensure(q.size() + 1);
  return q;
}

}  // namespace detail

struct MixerResult {
  PermutationProg q;
  std::shared_ptr<detail::MixerState> state;

  const std::vector<Agreement>& agreements() const { return state->agreements; }
  std::vector<index_t> agreement_indices(int target) const {
    std::vector<index_t> out;
    for (const auto& a : state->agreements)
      if (a.target == target) out.push_back(a.index);
    return out;
  }
};

namespace detail {

inline MixerResult mix(PermutationProg p1, PermutationProg p2, std::size_t rounds,
                       std::uint64_t budget, std::string label1, std::string label2,
                       std::string name) {
  if (rounds < 1) throw Error(ErrorKind::Precondition, "rounds must be >= 1");
  auto ms = std::make_shared<MixerState>();
  ms->even = std::move(p1);
  ms->odd = std::move(p2);
  ms->even_label = std::move(label1);
  ms->odd_label = std::move(label2);
  ms->budget = Budget(budget, ErrorKind::SearchBudgetExceeded);
  PermutationProg q = make_mixer(ms, std::move(name), rounds);
  return {q, ms};
}

}  // namespace detail

// Stages alternate: odd stages realize {q(n) : n <= i} = {p2(n) : n <= i},
// even stages the same with p1. Missing values are placed in increasing
// order at the smallest free positions. mixer(p) is mixer2(identity, p).
inline MixerResult mixer2(PermutationProg p1, PermutationProg p2, std::size_t rounds,
                          std::uint64_t budget = default_budget()) {
  std::string name = "mix2:" + p1.name() + ";" + p2.name();
  return detail::mix(std::move(p1), std::move(p2), rounds, budget, "p1", "p2", std::move(name));
}

inline MixerResult mixer(PermutationProg p, std::size_t rounds,
                         std::uint64_t budget = default_budget()) {
  std::string name = "mix:" + p.name();
  return detail::mix(perms::identity(), std::move(p), rounds, budget, "identity", "p",
                     std::move(name));
}

// Brute-force check that {q(n) : n <= i} = {t(n) : n <= i}.
inline bool set_prefix_agrees(PermutationProg q, PermutationProg t, index_t i) {
  auto a = q.prefix(i + 1);
  auto b = t.prefix(i + 1);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

// Trace of a mixed permutation. Checkpoints are the stride multiples plus
// every agreement index below the horizon. The classification window starts
// at the last agreement with the even-stage target (the identity for
// mixer(p)), so it covers one full excursion from that agreement to the
// horizon; the default last-10% window would sit inside a single monotone
// stretch and could never see the oscillation.
inline PartialSumTrace mixer_trace(const SeriesSpec& a, MixerResult& m, index_t horizon,
                                   index_t stride, ClassifyParams params = {}) {
  m.q.ensure(horizon);  // runs any lazy stages first so their agreements are logged
  std::vector<index_t> extra;
  index_t last_even = 0;
  for (const auto& ag : m.agreements())
    if (ag.index + 1 <= horizon) {
      extra.push_back(ag.index + 1);
      if (ag.target == 0) last_even = ag.index + 1;
    }
  PartialSumTrace tr = partial_sums(a, m.q, horizon, stride, ClassifyParams{}, extra);
  if (!params.window) {
    std::size_t w = 0;
    for (const auto& c : tr.checkpoints)
      if (c.index >= last_even) ++w;
    params.window = std::max<std::size_t>(w, 3);
  }
  if (tr.checkpoints.size() >= 3)
    tr.classification = classify_behavior(tr.checkpoints, params, Rational(10) * a.at(horizon).abs());
  return tr;
}

// g(n) = 1 + max{p(m) : m <= a} with a = max{p^-1(k) : k <= n}, so that
// p(i) <= n and p(j) >= g(n) force i <= a < j. Without the +1 the bound
// fails at equality (swap-pairs, n = 0: p(1) = 0, p(0) = 1 = max).
// Memoized and extended incrementally; g on 0..n costs O(n + a) lookups.
class BoundFunction {
 public:
  explicit BoundFunction(PermutationProg p, std::uint64_t budget = default_budget())
      : p_(std::move(p)), budget_(budget, ErrorKind::SearchBudgetExceeded) {}

  index_t operator()(index_t n) {
    while (a_.size() <= n) {
      index_t k = a_.size();
      index_t inv = p_.inverse(k, budget_);
      index_t a = a_.empty() ? inv : std::max(a_.back(), inv);
      a_.push_back(a);
      for (; scanned_ <= a; ++scanned_) gmax_ = std::max(gmax_, p_(scanned_));
      g_.push_back(gmax_ + 1);
    }
    return g_[n];
  }
  // a(n) = max{p^-1(k) : k <= n}
  index_t reach(index_t n) {
    (*this)(n);
    return a_[n];
  }
  PermutationProg& perm() { return p_; }

 private:
  PermutationProg p_;
  Budget budget_;
  std::vector<index_t> a_;
  std::vector<index_t> g_;
  index_t scanned_ = 0;
  index_t gmax_ = 0;
};

inline index_t bound_function_g(PermutationProg p, index_t n) {
  BoundFunction g(std::move(p));
  return g(n);
}

struct DominationMode {
  enum class Kind { Everywhere, InfinitelyOften };
  Kind kind = Kind::Everywhere;
  index_t stride = 1;
  static DominationMode everywhere() { return {Kind::Everywhere, 1}; }
  static DominationMode infinitely_often(index_t stride) {
    if (stride < 1) throw Error(ErrorKind::Precondition, "stride must be >= 1");
    return {Kind::InfinitelyOften, stride};
  }
};

// Everywhere:       f(n) = 1 + max(n + 1, max_e g_e(n), f(n-1) + 1)
// InfinitelyOften:  f(n) = f(n-1) + 1, except for n = 0 mod stride where
//                   f(n) = 1 + max(f(n-1), max_e g_e(n)); f(-1) = 0.
inline GrowthFunction dominating_f_for(const std::vector<PermutationProg>& family,
                                       DominationMode mode) {
  struct Memo {
    std::vector<BoundFunction> gs;
    std::vector<index_t> f;
  };
  auto memo = std::make_shared<Memo>();
  for (const auto& p : family) memo->gs.emplace_back(p);
  auto rule = [memo, mode](index_t n) {
    while (memo->f.size() <= n) {
      index_t k = memo->f.size();
      index_t prev = k == 0 ? 0 : memo->f.back();
      index_t gmax = 0;
      bool jump = mode.kind == DominationMode::Kind::Everywhere || k % mode.stride == 0;
      if (jump)
        for (auto& g : memo->gs) gmax = std::max(gmax, g(k));
      index_t v;
      if (mode.kind == DominationMode::Kind::Everywhere)
        v = 1 + std::max({k + 1, gmax, k == 0 ? index_t(0) : prev + 1});
      else
        v = jump ? 1 + std::max(prev, gmax) : prev + 1;
      memo->f.push_back(v);
    }
    return memo->f[n];
  };
  std::string name = mode.kind == DominationMode::Kind::Everywhere
                         ? "dominating"
                         : "dominating-io:" + std::to_string(mode.stride);
  return GrowthFunction(std::move(name), rule, Growth::StrictlyIncreasing);
}

struct LayerVerdict {
  bool member = true;
  // First partial-sum index m (>= the lower index bound) with S_m > k.
  std::optional<index_t> first_exit;
  index_t checked_from = 0;
  index_t horizon = 0;
  // Unused nonnegative-term indices which, appended to the prefix, push the
  // running sum above k. Empty when none was found within the budget.
  std::vector<index_t> escape;
  std::optional<Rational> escape_sum;
};

// Finite-stage proxy for E_k = {p : sum_{n <= m} a_{p(n)} <= k for all m >= k}:
// checks S_m <= k for ceil(k) <= m < horizon.
inline LayerVerdict escape_layer_Ek(const SeriesSpec& a, const Rational& k, PermutationProg p,
                                    index_t horizon, std::uint64_t budget = default_budget()) {
  if (horizon < 1) throw Error(ErrorKind::Precondition, "horizon must be >= 1");
  p.ensure(horizon);
  LayerVerdict v;
  v.horizon = horizon;
  if (k.sign() > 0) {
    mpz_class c = (k.num() + k.den() - 1) / k.den();
    v.checked_from = c.fits_ulong_p() ? c.get_ui() : npos;
  }
  Rational s;
  std::vector<char> used;
  for (index_t m = 0; m < horizon; ++m) {
    index_t idx = p(m);
    if (idx >= used.size()) used.resize(std::max<index_t>(idx + 1, used.size() * 2), 0);
    used[idx] = 1;
    s += a.at(idx);
    if (m >= v.checked_from && s > k && !v.first_exit) {
      v.first_exit = m;
      v.member = false;
    }
  }
  // Escape block: unused nonnegative terms in index order until the sum
  // exceeds k. Tracked in double-double, confirmed exactly at the end.
  DD run = to_dd(s);
  DD kdd = to_dd(k);
  Budget b(budget, ErrorKind::BudgetExceeded);
  std::vector<index_t> block;
  index_t idx = 0;
  try {
    while (true) {
      while (true) {
        b.charge();
        bool unused = idx >= used.size() || !used[idx];
        if (unused && a.approx_at(idx).hi > 0) break;
        ++idx;
      }
      block.push_back(idx);
      run = dd_add(run, a.approx_at(idx));
      ++idx;
      if (run.hi - kdd.hi > 1e-9 * (1 + std::fabs(kdd.hi))) {
        SplitSum ex;
        for (index_t j : block) ex.add(a.at(j));
        Rational total = s + ex.take();
        if (total > k) {
          v.escape = std::move(block);
          v.escape_sum = total;
          break;
        }
      }
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BudgetExceeded) throw;
  }
  return v;
}

// Padded series b (a placed on the orbit of f) read in the order of p.
// Running exact sums of b∘p; only orbit points contribute.
class PaddedPrefix {
 public:
  PaddedPrefix(const SeriesSpec& a, const GrowthFunction& f, PermutationProg p)
      : a_(a), orbit_(f), p_(std::move(p)) {}

  // sum_{n <= c} b_{p(n)}
  const Rational& sum_through(index_t c) {
    for (; next_ <= c; ++next_) {
      if (auto l = orbit_.position_of(p_(next_))) {
        sum_ += a_.at(*l);
        order_.push_back({next_, *l});
      }
    }
    return sum_;
  }
  // (position in p, orbit level) of the nonzero terms seen so far.
  const std::vector<std::pair<index_t, index_t>>& nonzero_order() const { return order_; }
  const Orbit& orbit() const { return orbit_; }

 private:
  SeriesSpec a_;
  Orbit orbit_;
  PermutationProg p_;
  index_t next_ = 0;
  Rational sum_;
  std::vector<std::pair<index_t, index_t>> order_;
};

struct PaddingLevel {
  index_t m = 0;
  index_t orbit_point = 0;  // f^m(0)
  index_t position = 0;     // c_m = max p^-1(0..f^m(0))
  Rational permuted_sum;    // sum_{n <= c_m} b_{p(n)}
  Rational original_sum;    // sum_{l <= m} a_l
  bool equal = false;
};

struct PaddingAudit {
  std::vector<PaddingLevel> levels;
  std::size_t inversions = 0;
  // Position in p of the last nonzero term that comes after a later orbit level.
  std::optional<index_t> last_inversion;
  bool all_equal() const {
    return std::all_of(levels.begin(), levels.end(), [](const PaddingLevel& l) { return l.equal; });
  }
};

// Levels m = 0..levels-1 (checkpoints f^m(0)) and the order in which p
// visits the nonzero terms of b up to the last checkpoint.
inline PaddingAudit padding_audit(const SeriesSpec& a, const GrowthFunction& f, PermutationProg p,
                                  std::size_t levels) {
  PaddedPrefix pp(a, f, p);
  BoundFunction bf(p);
  PaddingAudit out;
  Rational orig;
  for (index_t m = 0; m < levels; ++m) {
    PaddingLevel l;
    l.m = m;
    l.orbit_point = pp.orbit().point(m);
    l.position = bf.reach(l.orbit_point);
    l.permuted_sum = pp.sum_through(l.position);
    orig += a.at(m);
    l.original_sum = orig;
    l.equal = l.permuted_sum == l.original_sum;
    out.levels.push_back(std::move(l));
  }
  const auto& ord = pp.nonzero_order();
  index_t top = 0;
  for (std::size_t k = 0; k < ord.size(); ++k) {
    for (std::size_t e = 0; e < k; ++e) out.inversions += ord[e].second > ord[k].second;
    if (k > 0 && ord[k].second < top) out.last_inversion = ord[k].first;
    top = std::max(top, ord[k].second);
  }
  return out;
}

struct IoCheckpoint {
  index_t n = 0;
  index_t orbit_n = 0;   // f^n(0)
  index_t g_value = 0;   // g(f^n(0))
  index_t orbit_n2 = 0;  // f^{n+2}(0)
  index_t position = 0;  // max p^-1(0..f^n(0))
  Rational permuted_sum;
  // Some j with |permuted_sum - sum_{l <= j} a_l| <= |a_{j+1}|.
  std::optional<index_t> matched_j;
};

// Orbit indices n <= max_n with f^{n+2}(0) >= g(f^n(0)).
inline std::vector<IoCheckpoint> io_checkpoints(const SeriesSpec& a, const GrowthFunction& f,
                                                PermutationProg p, index_t max_n) {
  PaddedPrefix pp(a, f, p);
  BoundFunction bf(p);
  std::vector<IoCheckpoint> out;
  std::vector<Rational> partial;  // partial[j] = sum_{l <= j} a_l
  for (index_t n = 0; n <= max_n; ++n) {
    IoCheckpoint k;
    k.n = n;
    k.orbit_n = pp.orbit().point(n);
    k.orbit_n2 = pp.orbit().point(n + 2);
    k.g_value = bf(k.orbit_n);
    if (k.orbit_n2 < k.g_value) continue;
    k.position = bf.reach(k.orbit_n);
    k.permuted_sum = pp.sum_through(k.position);
    for (index_t j = 0; j <= n + 4; ++j) {
      while (partial.size() <= j) partial.push_back((partial.empty() ? Rational() : partial.back()) + a.at(partial.size()));
      if ((k.permuted_sum - partial[j]).abs() <= a.at(j + 1).abs()) {
        k.matched_j = j;
        break;
      }
    }
    out.push_back(std::move(k));
  }
  return out;
}

}  // namespace rlab
