#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "perm_prog.hpp"

namespace rlab {

using Value = std::uint64_t;
using Prefix = std::span<const Value>;

struct Predictor {
  std::string name;
  // k-th element of D, strictly increasing in k. nullopt once the known part
  // of D is used up (finite traces).
  std::function<std::optional<index_t>(index_t k)> d_at;
  // pi_n on a prefix of length exactly n; nullopt is "no prediction".
  std::function<std::optional<Value>(index_t n, Prefix)> pi;
  // Optional exact max{pi_n(t) : t in k^n, pi_n(t) defined}, 0 when nothing
  // is defined. Only called for n in D.
  std::function<Value(index_t n, Value k)> bounded_max;

  // Elements of D below horizon; checks strict increase.
  std::vector<index_t> domain_below(index_t horizon) const {
    std::vector<index_t> out;
    for (index_t k = 0;; ++k) {
      auto d = d_at(k);
      if (!d || *d >= horizon) break;
      if (!out.empty() && *d <= out.back())
        throw Error(ErrorKind::NotIncreasing, name + ": D is not strictly increasing at " +
                                                   std::to_string(k));
      out.push_back(*d);
    }
    return out;
  }
};

inline std::function<std::optional<index_t>(index_t)> all_naturals() {
  return [](index_t k) { return std::optional<index_t>(k); };
}

inline Predictor constant_predictor(Value c, std::function<std::optional<index_t>(index_t)> d = all_naturals()) {
  Predictor p;
  p.name = c == 0 ? "zero" : "const:" + std::to_string(c);
  p.d_at = std::move(d);
  p.pi = [c](index_t, Prefix) { return std::optional<Value>(c); };
  p.bounded_max = [c](index_t, Value) { return c; };
  return p;
}

struct LibFunc {
  std::string name;
  std::function<Value(index_t)> f;
};

// pi_n(s) = funcs[e](n) for the least e with funcs[e] restricted to n equal
// to s; no prediction if nothing matches.
inline Predictor predictor_from_library(std::vector<LibFunc> funcs) {
  if (funcs.empty()) throw Error(ErrorKind::Precondition, "empty function library");
  auto lib = std::make_shared<std::vector<LibFunc>>(std::move(funcs));
  Predictor p;
  p.name = "lib:";
  for (std::size_t e = 0; e < lib->size(); ++e) p.name += (e ? "," : "") + (*lib)[e].name;
  p.d_at = all_naturals();
  p.pi = [lib](index_t n, Prefix s) -> std::optional<Value> {
    for (const auto& fn : *lib) {
      bool match = true;
      for (index_t i = 0; i < n && match; ++i) match = fn.f(i) == s[i];
      if (match) return fn.f(n);
    }
    return std::nullopt;
  };
  // A prefix t in k^n gets a prediction from e exactly when e is the least
  // index with that prefix, so the max runs over those e whose own prefix
  // stays below k.
  p.bounded_max = [lib](index_t n, Value k) {
    Value best = 0;
    for (std::size_t e = 0; e < lib->size(); ++e) {
      const auto& fe = (*lib)[e].f;
      bool below = true;
      for (index_t i = 0; i < n && below; ++i) below = fe(i) < k;
      if (!below) continue;
      bool least = true;
      for (std::size_t d = 0; d < e && least; ++d) {
        bool same = true;
        for (index_t i = 0; i < n && same; ++i) same = (*lib)[d].f(i) == fe(i);
        least = !same;
      }
      if (least) best = std::max(best, fe(n));
    }
    return best;
  };
  return p;
}

enum class Verdict { PredictedSoFar, EvadedInfOftenWitness };

inline const char* to_string(Verdict v) {
  return v == Verdict::PredictedSoFar ? "PredictedSoFar" : "EvadedInfOftenWitness";
}

struct GameReport {
  index_t horizon = 0;
  std::vector<index_t> d_points;
  std::vector<index_t> mismatches;      // includes undefined hits
  std::vector<index_t> undefined_hits;
  // Evaded when the last D-point below the horizon is a mismatch, i.e. the
  // predictor is still failing at the end of the run.
  Verdict verdict = Verdict::PredictedSoFar;
  std::size_t count() const { return mismatches.size(); }
};

inline std::vector<Value> materialize(const std::function<Value(index_t)>& x, index_t horizon) {
  std::vector<Value> xs(horizon);
  for (index_t n = 0; n < horizon; ++n) xs[n] = x(n);
  return xs;
}

inline GameReport play_game(const Predictor& P, const std::vector<Value>& xs, index_t horizon) {
  if (xs.size() < horizon)
    throw Error(ErrorKind::Precondition, "x is shorter than the horizon");
  GameReport r;
  r.horizon = horizon;
  r.d_points = P.domain_below(horizon);
  for (index_t n : r.d_points) {
    auto guess = P.pi(n, Prefix(xs.data(), n));
    if (!guess) {
      r.undefined_hits.push_back(n);
      r.mismatches.push_back(n);
    } else if (*guess != xs[n]) {
      r.mismatches.push_back(n);
    }
  }
  if (!r.d_points.empty() && !r.mismatches.empty() && r.mismatches.back() == r.d_points.back())
    r.verdict = Verdict::EvadedInfOftenWitness;
  return r;
}

inline GameReport play_game(const Predictor& P, const std::function<Value(index_t)>& x,
                            index_t horizon) {
  return play_game(P, materialize(x, horizon), horizon);
}

// max{pi_n(t) : t in k^n} by brute enumeration, limited to `budget` prefixes.
inline Value enumerate_bounded_max(const Predictor& P, index_t n, Value k, std::uint64_t budget) {
  std::uint64_t total = 1;
  for (index_t i = 0; i < n; ++i) {
    if (k != 0 && total > budget / k)
      throw Error(ErrorKind::BudgetExceeded,
                  std::to_string(k) + "^" + std::to_string(n) + " prefixes exceed the budget");
    total *= k;
  }
  if (k == 0 && n > 0) return 0;
  std::vector<Value> t(n, 0);
  Value best = 0;
  for (std::uint64_t c = 0; c < total; ++c) {
    if (auto v = P.pi(n, Prefix(t.data(), n))) best = std::max(best, *v);
    for (index_t i = n; i-- > 0;) {
      if (++t[i] < k) break;
      t[i] = 0;
    }
  }
  return best;
}

using Dominator = std::function<Value(index_t n, Value k)>;

// x(n) = g(n, 1 + max{x(m) : m < n}). Without a caller g, g = f + 1 with
// f(n, k) = max{pi_n(t) : t in k^n} for n in D and 0 elsewhere, taken from
// the predictor's exact bound when it has one and by enumeration otherwise.
inline std::vector<Value> evader_from_dominator(const Predictor& P, index_t horizon,
                                                std::optional<Dominator> g = std::nullopt,
                                                std::uint64_t budget = default_budget()) {
  std::vector<index_t> d = P.domain_below(horizon);
  std::set<index_t> in_d(d.begin(), d.end());
  std::vector<Value> x;
  x.reserve(horizon);
  Value mx = 0;
  for (index_t n = 0; n < horizon; ++n) {
    if (mx == std::numeric_limits<Value>::max())
      throw Error(ErrorKind::Precondition, "evader values overflow");
    Value k = 1 + mx;
    Value v;
    if (g) {
      v = (*g)(n, k);
    } else {
      Value f = 0;
      if (in_d.count(n))
        f = P.bounded_max ? P.bounded_max(n, k) : enumerate_bounded_max(P, n, k, budget);
      if (f == std::numeric_limits<Value>::max())
        throw Error(ErrorKind::Precondition, "evader values overflow");
      v = f + 1;
    }
    x.push_back(v);
    mx = std::max(mx, v);
  }
  return x;
}

// x(m) = least value not predicted at m by any P_e with e <= m and m in D_e.
inline std::vector<Value> evader_against_family(const std::vector<Predictor>& preds,
                                                index_t horizon) {
  std::vector<std::set<index_t>> doms;
  for (const auto& p : preds) {
    auto d = p.domain_below(horizon);
    doms.emplace_back(d.begin(), d.end());
  }
  std::vector<Value> x;
  x.reserve(horizon);
  for (index_t m = 0; m < horizon; ++m) {
    std::set<Value> forbidden;
    std::size_t top = std::min<std::size_t>(m, preds.size() == 0 ? 0 : preds.size() - 1);
    for (std::size_t e = 0; e <= top && e < preds.size(); ++e) {
      if (!doms[e].count(m)) continue;
      if (auto v = preds[e].pi(m, Prefix(x.data(), m))) forbidden.insert(*v);
    }
    Value v = 0;
    while (forbidden.count(v)) ++v;
    x.push_back(v);
  }
  return x;
}

// Finite trace: block n (1-based) holds n distinct strings of length n over
// {0..alphabet-1}, laid out on I_n = [n(n-1)/2, n(n+1)/2).
struct Trace {
  Value alphabet = 0;
  std::map<index_t, std::vector<std::vector<Value>>> blocks;

  static index_t block_start(index_t n) { return n * (n - 1) / 2; }
  // Block n with i in I_n.
  static index_t block_of(index_t i) {
    index_t n = 1;
    while (block_start(n + 1) <= i) ++n;
    return n;
  }

  index_t max_block() const { return blocks.empty() ? 0 : blocks.rbegin()->first; }

  void validate() const {
    index_t expect = 1;
    for (const auto& [n, members] : blocks) {
      if (n != expect)
        throw Error(ErrorKind::MalformedTrace, "block " + std::to_string(expect) + " missing");
      ++expect;
      if (members.size() != n)
        throw Error(ErrorKind::MalformedTrace, "block " + std::to_string(n) + " has " +
                                                   std::to_string(members.size()) + " members");
      std::set<std::vector<Value>> seen;
      for (const auto& s : members) {
        if (s.size() != n)
          throw Error(ErrorKind::MalformedTrace,
                      "block " + std::to_string(n) + " member of length " + std::to_string(s.size()));
        for (Value v : s)
          if (alphabet != 0 && v >= alphabet)
            throw Error(ErrorKind::MalformedTrace, "symbol " + std::to_string(v) +
                                                       " outside alphabet " + std::to_string(alphabet));
        if (!seen.insert(s).second)
          throw Error(ErrorKind::MalformedTrace, "block " + std::to_string(n) + " repeats a member");
      }
    }
  }

  // One block per line: "n: s1 s2 ... sn", each string comma-separated
  // symbols. Blank lines and lines starting with '#' are skipped. The
  // alphabet is one more than the largest symbol seen.
  static Trace parse(std::istream& in) {
    Trace t;
    std::string line;
    index_t lineno = 0;
    Value top = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      auto colon = line.find(':');
      auto bad = [&](const std::string& why) {
        return Error(ErrorKind::MalformedTrace, "line " + std::to_string(lineno) + ": " + why);
      };
      if (colon == std::string::npos) throw bad("missing ':'");
      index_t n = 0;
      try {
        std::size_t used = 0;
        n = std::stoull(line.substr(0, colon), &used);
      } catch (const std::exception&) {
        throw bad("bad block number");
      }
      if (n == 0) throw bad("block numbers start at 1");
      if (t.blocks.count(n)) throw bad("block " + std::to_string(n) + " given twice");
      std::istringstream rest(line.substr(colon + 1));
      std::string tok;
      std::vector<std::vector<Value>> members;
      while (rest >> tok) {
        std::vector<Value> s;
        std::istringstream parts(tok);
        std::string sym;
        while (std::getline(parts, sym, ',')) {
          if (sym.empty() || sym.find_first_not_of("0123456789") != std::string::npos)
            throw bad("bad symbol '" + sym + "'");
          Value v = std::stoull(sym);
          top = std::max(top, v);
          s.push_back(v);
        }
        members.push_back(std::move(s));
      }
      t.blocks.emplace(n, std::move(members));
    }
    t.alphabet = top + 1;
    t.validate();
    return t;
  }
};

struct BlockAudit {
  index_t n = 0;
  std::vector<index_t> first_differences;  // block coordinates, sorted
  index_t j_block = 0;
  index_t j_global = 0;
};

// Positions where two members agree below and differ at the position.
inline std::vector<index_t> first_difference_positions(
    const std::vector<std::vector<Value>>& members) {
  std::set<index_t> fd;
  for (std::size_t a = 0; a < members.size(); ++a)
    for (std::size_t b = a + 1; b < members.size(); ++b) {
      const auto& x = members[a];
      const auto& y = members[b];
      for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i)
        if (x[i] != y[i]) {
          fd.insert(i);
          break;
        }
    }
  return {fd.begin(), fd.end()};
}

inline BlockAudit audit_block(index_t n, const std::vector<std::vector<Value>>& members) {
  BlockAudit a;
  a.n = n;
  a.first_differences = first_difference_positions(members);
  // n distinct strings branch at most n-1 times, so some position of the
  // n-long block is never a first difference.
  if (a.first_differences.size() > n - 1)
    throw Error(ErrorKind::MalformedTrace,
                "block " + std::to_string(n) + " has " +
                    std::to_string(a.first_differences.size()) + " first differences");
  index_t j = 0;
  for (index_t fd : a.first_differences) {
    if (fd != j) break;
    ++j;
  }
  a.j_block = j;
  a.j_global = Trace::block_start(n) + j;
  return a;
}

inline std::vector<BlockAudit> audit_trace(const Trace& T) {
  T.validate();
  std::vector<BlockAudit> out;
  for (const auto& [n, members] : T.blocks) out.push_back(audit_block(n, members));
  return out;
}

// Predicts at the least non-first-difference position j of each block: all
// members consistent with the prefix inside the block agree at j.
inline Predictor trace_predictor(const Trace& T) {
  auto audits = std::make_shared<std::vector<BlockAudit>>(audit_trace(T));
  auto trace = std::make_shared<Trace>(T);
  Predictor p;
  p.name = "trace";
  p.d_at = [audits](index_t k) -> std::optional<index_t> {
    if (k < audits->size()) return (*audits)[k].j_global;
    return std::nullopt;
  };
  p.pi = [audits, trace](index_t j, Prefix s) -> std::optional<Value> {
    index_t n = Trace::block_of(j);
    if (n > audits->size() || (*audits)[n - 1].j_global != j) return std::nullopt;
    index_t b = Trace::block_start(n);
    for (const auto& m : trace->blocks.at(n)) {
      bool ok = true;
      for (index_t i = 0; b + i < j && ok; ++i) ok = m[i] == s[b + i];
      if (ok) return m[j - b];
    }
    return std::nullopt;
  };
  return p;
}

struct LayerMembership {
  bool member = false;
  std::size_t mismatches = 0;
};

// C_i = {x : fewer than i mismatches}, judged below the horizon.
inline LayerMembership meager_layer_Ci(const Predictor& P, std::size_t i,
                                       const std::vector<Value>& prefix, index_t horizon) {
  if (prefix.size() < horizon)
    throw Error(ErrorKind::Precondition, "prefix shorter than the horizon");
  GameReport r = play_game(P, prefix, horizon);
  return {r.count() < i, r.count()};
}

}  // namespace rlab
