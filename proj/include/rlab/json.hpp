#pragma once

// JSON views of the report types, shared by the command line tool and the
// acceptance runner. Needs nlohmann/json on the include path.

#include <charconv>
#include <string>

#include <json.hpp>

#include "partial_sums.hpp"
#include "permutations.hpp"
#include "prediction.hpp"
#include "stochastic.hpp"

namespace rlab {

using json = nlohmann::ordered_json;

// Shortest round-trip decimal form; identical on every run.
inline std::string fmt_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// Exact value as "num/den" when short, otherwise only its size; the CSV
// output always carries the exact digits.
inline json rational_json(const Rational& r, std::size_t max_digits = 64) {
  json j;
  j["approx"] = r.to_double();
  std::size_t digits = mpz_sizeinbase(r.num().get_mpz_t(), 10) + mpz_sizeinbase(r.den().get_mpz_t(), 10);
  if (digits <= max_digits)
    j["exact"] = r.to_string();
  else
    j["digits"] = digits;
  return j;
}

inline json to_json(const Classification& c) {
  json j;
  j["kind"] = to_string(c.kind);
  if (c.kind == Behavior::ConvergedNear) {
    j["value"] = rational_json(c.value);
    j["radius"] = rational_json(c.radius);
  }
  if (c.kind == Behavior::Oscillating) {
    j["low_witness"] = c.low_witness;
    j["high_witness"] = c.high_witness;
  }
  return j;
}

inline json trace_summary(const PartialSumTrace& tr) {
  json j;
  j["horizon"] = tr.horizon;
  j["checkpoints"] = tr.checkpoints.size();
  j["final_sum"] = rational_json(tr.checkpoints.back().sum);
  j["classification"] = to_json(tr.classification);
  return j;
}

inline json to_json(const GameReport& r) {
  json j;
  j["horizon"] = r.horizon;
  j["d_points"] = r.d_points.size();
  j["mismatches"] = r.mismatches;
  j["undefined_hits"] = r.undefined_hits;
  j["verdict"] = to_string(r.verdict);
  j["count"] = r.count();
  return j;
}

inline json report_json(const MonteCarloReport& r, json inputs = json::object()) {
  json j;
  j["operation"] = r.operation;
  j["inputs"] = std::move(inputs);
  j["seed"] = r.seed;
  j["trials"] = r.trials;
  j["estimate"] = r.estimate;
  j["bound"] = r.bound;
  j["slack"] = r.slack;
  j["pass"] = r.pass;
  if (r.degenerate) j["degenerate"] = true;
  if (r.exact) j["exact_probability"] = r.exact->to_string();
  if (r.exact_bound) j["exact_bound"] = r.exact_bound->to_string();
  return j;
}

inline json report_json(const ConvergenceReport& r, json inputs = json::object()) {
  json j;
  j["operation"] = "rademacher_convergence_experiment";
  j["inputs"] = std::move(inputs);
  j["seed"] = r.base_seed;
  j["trials"] = r.seeds;
  j["estimate"] = r.pass_fraction();
  j["passed"] = r.passed;
  return j;
}

inline json to_json(const std::vector<Agreement>& ags, const MixerResult& m) {
  json arr = json::array();
  for (const auto& a : ags) {
    json j;
    j["stage"] = a.stage;
    j["target"] = a.target == 1 ? m.state->odd_label : m.state->even_label;
    j["index"] = a.index;
    arr.push_back(j);
  }
  return arr;
}

}  // namespace rlab
