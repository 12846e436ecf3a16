#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "perm_prog.hpp"
#include "rational.hpp"
#include "series.hpp"

namespace rlab {

// index = number of terms summed, so the checkpoint (k, s) carries
// s = sum_{n < k} a_{perm(n)}.
struct Checkpoint {
  index_t index = 0;
  Rational sum;
};

enum class Behavior { ConvergedNear, DivergesPlus, DivergesMinus, Oscillating, Undetermined };

inline const char* to_string(Behavior b) {
  switch (b) {
    case Behavior::ConvergedNear: return "ConvergedNear";
    case Behavior::DivergesPlus: return "DivergesPlus";
    case Behavior::DivergesMinus: return "DivergesMinus";
    case Behavior::Oscillating: return "Oscillating";
    case Behavior::Undetermined: return "Undetermined";
  }
  return "?";
}

struct Classification {
  Behavior kind = Behavior::Undetermined;
  Rational value;   // ConvergedNear
  Rational radius;  // ConvergedNear
  index_t low_witness = 0;   // Oscillating: checkpoint indices
  index_t high_witness = 0;
};

struct ClassifyParams {
  std::optional<std::size_t> window;  // default: last 10% of checkpoints, at least 3
  Rational osc_gap = Rational(1, 2);
  std::optional<Rational> conv_radius;  // default: 10 |a_horizon|
};

struct PartialSumTrace {
  index_t horizon = 0;
  std::vector<Checkpoint> checkpoints;
  Classification classification;
};

inline std::size_t default_window(std::size_t count) {
  std::size_t w = (count + 9) / 10;
  return std::min(count, std::max<std::size_t>(w, 3));
}

// Finite-horizon verdict, tested in order: converged, monotone divergence,
// oscillation, undetermined.
inline Classification classify_behavior(const std::vector<Checkpoint>& cps, std::size_t window,
                                        const Rational& osc_gap, const Rational& conv_radius) {
  if (cps.size() < 3)
    throw Error(ErrorKind::InsufficientData,
                "need at least 3 checkpoints, got " + std::to_string(cps.size()));
  window = std::clamp<std::size_t>(window, 1, cps.size());
  const std::size_t first = cps.size() - window;
  const Rational& final_sum = cps.back().sum;

  Classification c;
  bool converged = true;
  for (std::size_t i = first; i < cps.size() && converged; ++i)
    converged = (cps[i].sum - final_sum).abs() <= conv_radius;
  if (converged) {
    c.kind = Behavior::ConvergedNear;
    c.value = final_sum;
    c.radius = conv_radius;
    return c;
  }

  bool up = true, down = true;
  for (std::size_t i = first + 1; i < cps.size(); ++i) {
    if (cps[i].sum < cps[i - 1].sum) up = false;
    if (cps[i].sum > cps[i - 1].sum) down = false;
  }
  const Rational& w0 = cps[first].sum;
  bool above_earlier = true, below_earlier = true;
  for (std::size_t i = 0; i < first; ++i) {
    if (cps[i].sum > w0) above_earlier = false;
    if (cps[i].sum < w0) below_earlier = false;
  }
  const Rational rise = final_sum - cps.front().sum;
  if (up && above_earlier && rise >= osc_gap) {
    c.kind = Behavior::DivergesPlus;
    return c;
  }
  if (down && below_earlier && -rise >= osc_gap) {
    c.kind = Behavior::DivergesMinus;
    return c;
  }

  std::size_t lo = first, hi = first;
  for (std::size_t i = first; i < cps.size(); ++i) {
    if (cps[i].sum <= cps[lo].sum) lo = i;
    if (cps[i].sum >= cps[hi].sum) hi = i;
  }
  if (cps[hi].sum - cps[lo].sum > osc_gap) {
    c.kind = Behavior::Oscillating;
    c.low_witness = cps[lo].index;
    c.high_witness = cps[hi].index;
    return c;
  }
  c.kind = Behavior::Undetermined;
  return c;
}

inline Classification classify_behavior(const std::vector<Checkpoint>& cps,
                                        const ClassifyParams& params,
                                        const Rational& default_radius) {
  std::size_t w = params.window ? *params.window : default_window(cps.size());
  return classify_behavior(cps, w, params.osc_gap,
                           params.conv_radius ? *params.conv_radius : default_radius);
}

// Exact partial sums sum_{n < k} a_{perm(n)} at k = stride, 2 stride, ...,
// at every k in `extra` and at k = horizon. Terms between checkpoints are
// summed by binary splitting and folded into the running total once.
inline PartialSumTrace partial_sums(const SeriesSpec& a, PermutationProg perm, index_t horizon,
                                    index_t stride, const ClassifyParams& params = {},
                                    const std::vector<index_t>& extra = {}) {
  if (horizon < 1) throw Error(ErrorKind::Precondition, "horizon must be >= 1");
  if (stride < 1) throw Error(ErrorKind::Precondition, "checkpoint stride must be >= 1");
  if (!a.term) throw Error(ErrorKind::TermUndefined, a.name + " has no term rule");
  perm.ensure(horizon);

  std::set<index_t> marks;
  for (index_t k = stride; k < horizon; k += stride) marks.insert(k);
  for (index_t k : extra)
    if (k >= 1 && k <= horizon) marks.insert(k);
  marks.insert(horizon);

  PartialSumTrace tr;
  tr.horizon = horizon;
  Rational running;
  SplitSum block;
  index_t n = 0;
  for (index_t k : marks) {
    for (; n < k; ++n) block.add(a.at(perm(n)));
    running += block.take();
    tr.checkpoints.push_back({k, running});
  }
  if (tr.checkpoints.size() >= 3) {
    Rational radius = Rational(10) * a.at(horizon).abs();
    tr.classification = classify_behavior(tr.checkpoints, params, radius);
  }
  return tr;
}

}  // namespace rlab
