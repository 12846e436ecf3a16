#pragma once

#include <fstream>
#include <limits>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "perm_prog.hpp"
#include "permutations.hpp"
#include "prediction.hpp"
#include "rational.hpp"
#include "series.hpp"
#include "stochastic.hpp"

// String grammars used by the command line tool:
//   series     alt-harmonic | harmonic | geometric | zero
//              | padded:<f-spec> | rand-sign:<seed>
//   f-spec     linear:<a>,<b>                      f(n) = a n + b
//   perm       identity | swap-pairs | block-reverse:<w>
//              | riemann:<target>[@<hold>,<slope>] | mix:<perm> | mix2:<perm>;<perm>
//   target     plus-inf | minus-inf | <rational>
//   predictor  zero | lib:<fn>,<fn>,... | trace:<file>
//   sequence   <fn> | evade:<predictor> | diag:<predictor>;<predictor>;...
//   fn         zero | <c> | n | n^<k> | <b>^n | [<a>]n[+<b>]

namespace rlab::parse {

inline bool starts_with(std::string_view s, std::string_view p) {
  return s.substr(0, p.size()) == p;
}

inline std::uint64_t to_u64(const std::string& s, const char* what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw Error(ErrorKind::Parse, std::string("bad ") + what + " '" + s + "'");
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, std::string(what) + " out of range: '" + s + "'");
  }
}

inline GrowthFunction growth(const std::string& spec) {
  static const std::regex lin(R"(linear:(\d+),(\d+))");
  std::smatch m;
  if (std::regex_match(spec, m, lin))
    return linear_growth(to_u64(m[1], "slope"), to_u64(m[2], "offset"));
  throw Error(ErrorKind::Parse, "unknown growth function '" + spec + "'");
}

inline SeriesSpec series(const std::string& spec) {
  if (spec == "alt-harmonic") return series::alt_harmonic();
  if (spec == "harmonic") return series::harmonic();
  if (spec == "geometric") return series::geometric_half();
  if (spec == "zero") return series::zero();
  if (starts_with(spec, "padded:")) {
    SeriesSpec b = pad_series(series::alt_harmonic(), growth(spec.substr(7)));
    b.name = spec;
    return b;
  }
  if (starts_with(spec, "rand-sign:")) {
    std::uint64_t seed = to_u64(spec.substr(10), "seed");
    SignSequence sg(seed);
    return random_sign_series(series::harmonic(), [sg](index_t n) { return sg(n); }, spec);
  }
  throw Error(ErrorKind::Parse, "unknown series '" + spec + "'");
}

struct PermContext {
  SeriesSpec series = series::alt_harmonic();
  index_t horizon = 1;
  std::size_t rounds = 10;
  std::uint64_t budget = default_budget();
};

inline RiemannTarget riemann_target(const std::string& spec) {
  std::string body = spec;
  std::string sched;
  if (auto at = spec.find('@'); at != std::string::npos) {
    body = spec.substr(0, at);
    sched = spec.substr(at + 1);
  }
  RiemannTarget t;
  if (body == "plus-inf") t = RiemannTarget::plus_infinity();
  else if (body == "minus-inf") t = RiemannTarget::minus_infinity();
  else t = RiemannTarget::finite(Rational::parse(body));
  if (!sched.empty()) {
    if (t.kind == RiemannTarget::Kind::Finite)
      throw Error(ErrorKind::Parse, "a schedule only applies to infinite targets");
    auto comma = sched.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::Parse, "schedule is <hold>,<slope>");
    t.hold = to_u64(sched.substr(0, comma), "hold");
    t.slope = to_u64(sched.substr(comma + 1), "slope");
    if (t.slope == 0) throw Error(ErrorKind::Parse, "slope must be >= 1");
  }
  return t;
}

inline PermutationProg permutation(const std::string& spec, const PermContext& ctx) {
  if (spec == "identity") return perms::identity();
  if (spec == "swap-pairs") return perms::swap_pairs();
  if (starts_with(spec, "block-reverse:")) {
    auto w = to_u64(spec.substr(14), "block width");
    if (w == 0) throw Error(ErrorKind::Parse, "block width must be >= 1");
    return perms::block_reverse(w);
  }
  if (starts_with(spec, "riemann:"))
    return riemann_rearrange(ctx.series, riemann_target(spec.substr(8)), ctx.horizon);
  if (starts_with(spec, "mix:"))
    return mixer(permutation(spec.substr(4), ctx), ctx.rounds, ctx.budget).q;
  if (starts_with(spec, "mix2:")) {
    std::string rest = spec.substr(5);
    auto semi = rest.find(';');
    if (semi == std::string::npos) throw Error(ErrorKind::Parse, "mix2 needs <perm>;<perm>");
    return mixer2(permutation(rest.substr(0, semi), ctx), permutation(rest.substr(semi + 1), ctx),
                  ctx.rounds, ctx.budget)
        .q;
  }
  throw Error(ErrorKind::Parse, "unknown permutation '" + spec + "'");
}

namespace detail {

inline Value checked_mul(Value a, Value b) {
  if (a != 0 && b > std::numeric_limits<Value>::max() / a)
    throw Error(ErrorKind::Precondition, "function value overflows 64 bits");
  return a * b;
}
inline Value checked_add(Value a, Value b) {
  if (b > std::numeric_limits<Value>::max() - a)
    throw Error(ErrorKind::Precondition, "function value overflows 64 bits");
  return a + b;
}
inline Value checked_pow(Value base, Value e) {
  Value r = 1;
  for (Value i = 0; i < e; ++i) r = checked_mul(r, base);
  return r;
}

}  // namespace detail

inline LibFunc function(const std::string& spec) {
  using detail::checked_add;
  using detail::checked_mul;
  using detail::checked_pow;
  static const std::regex konst(R"(\d+)");
  static const std::regex power(R"(n\^(\d+))");
  static const std::regex expo(R"((\d+)\^n)");
  static const std::regex lin(R"((\d*)n(?:\+(\d+))?)");
  std::smatch m;
  if (spec == "zero") return {spec, [](index_t) { return Value(0); }};
  if (std::regex_match(spec, konst)) {
    Value c = to_u64(spec, "constant");
    return {spec, [c](index_t) { return c; }};
  }
  if (std::regex_match(spec, m, power)) {
    Value k = to_u64(m[1], "exponent");
    return {spec, [k](index_t n) { return checked_pow(n, k); }};
  }
  if (std::regex_match(spec, m, expo)) {
    Value b = to_u64(m[1], "base");
    return {spec, [b](index_t n) { return checked_pow(b, n); }};
  }
  if (std::regex_match(spec, m, lin)) {
    Value a = m[1].length() ? to_u64(m[1], "coefficient") : 1;
    Value b = m[2].matched ? to_u64(m[2], "offset") : 0;
    return {spec, [a, b](index_t n) { return checked_add(checked_mul(a, n), b); }};
  }
  throw Error(ErrorKind::Parse, "unknown function '" + spec + "'");
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline Trace trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open trace file '" + path + "'");
  return Trace::parse(in);
}

inline Predictor predictor(const std::string& spec) {
  if (spec == "zero") return constant_predictor(0);
  if (starts_with(spec, "lib:")) {
    std::vector<LibFunc> fs;
    for (const auto& tok : split(spec.substr(4), ',')) fs.push_back(function(tok));
    return predictor_from_library(std::move(fs));
  }
  if (starts_with(spec, "trace:")) return trace_predictor(trace_file(spec.substr(6)));
  throw Error(ErrorKind::Parse, "unknown predictor '" + spec + "'");
}

inline std::vector<Value> sequence(const std::string& spec, index_t horizon) {
  if (starts_with(spec, "evade:"))
    return evader_from_dominator(predictor(spec.substr(6)), horizon);
  if (starts_with(spec, "diag:")) {
    std::vector<Predictor> ps;
    for (const auto& tok : split(spec.substr(5), ';')) ps.push_back(predictor(tok));
    return evader_against_family(ps, horizon);
  }
  return materialize(function(spec).f, horizon);
}

}  // namespace rlab::parse
