#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace rlab {

using index_t = std::uint64_t;
inline constexpr index_t npos = ~index_t(0);

struct StageRecord {
  std::uint64_t stage = 0;   // 1-based
  std::string kind;          // e.g. "p", "identity", "p1", "p2", "fill"
  index_t begin = 0;         // positions [begin, end) were fixed by this stage
  index_t end = 0;
  index_t agreement = npos;  // agreement index realized by the stage, if any
};

// A bijection on the naturals built in stages. Only an initial segment
// [0, size()) is materialized; evaluation beyond it asks the extender to run
// more stages. Copies share state, so a prefix computed once is reused by
// every holder. Construction is single-writer: do not extend one program from
// several threads at once.
class PermutationProg {
 public:
  struct State {
    std::vector<index_t> fwd;
    std::vector<index_t> inv;  // npos where the value is not yet in the range
    std::vector<StageRecord> log;

    index_t size() const { return fwd.size(); }
    bool in_range(index_t v) const { return v < inv.size() && inv[v] != npos; }

    void push(index_t v) {
      if (v >= inv.size()) inv.resize(std::max<index_t>(v + 1, inv.size() * 3 / 2 + 16), npos);
      if (inv[v] != npos)
        throw Error(ErrorKind::Precondition,
                    "value " + std::to_string(v) + " assigned twice");
      inv[v] = fwd.size();
      fwd.push_back(v);
    }
    void record(std::string kind, index_t begin, index_t agreement = npos) {
      log.push_back({log.size() + 1, std::move(kind), begin, fwd.size(), agreement});
    }
  };

  // Called with the current state and a wanted length; must append at least
  // one value (it may append more, e.g. a whole stage).
  using Extender = std::function<void(State&, index_t want)>;

  PermutationProg() = default;
  PermutationProg(std::string name, Extender ext)
      : impl_(std::make_shared<Impl>()) {
    impl_->name = std::move(name);
    impl_->ext = std::move(ext);
  }

  const std::string& name() const { return impl().name; }
  index_t size() const { return impl().st.size(); }
  const std::vector<StageRecord>& stage_log() const { return impl().st.log; }
  const State& state() const { return impl().st; }

  void ensure(index_t len) {
    Impl& m = impl();
    while (m.st.size() < len) {
      index_t before = m.st.size();
      m.ext(m.st, len);
      if (m.st.size() == before)
        throw Error(ErrorKind::PermUndefined,
                    m.name + " cannot be extended past " + std::to_string(before));
    }
  }

  index_t operator()(index_t n) {
    ensure(n + 1);
    return impl().st.fwd[n];
  }
  index_t at(index_t n) { return (*this)(n); }

  std::optional<index_t> known_inverse(index_t v) const {
    const State& s = impl().st;
    if (s.in_range(v)) return s.inv[v];
    return std::nullopt;
  }

  // Position of value v, extending the prefix as needed. Every newly
  // generated position is charged to the budget.
  index_t inverse(index_t v, Budget& budget) {
    Impl& m = impl();
    while (!m.st.in_range(v)) {
      index_t before = m.st.size();
      index_t chunk = std::max<index_t>(64, before / 8);
      index_t room = budget.limit() > budget.used() ? budget.limit() - budget.used() : 0;
      if (room == 0) budget.charge(1);  // throws
      ensure(before + std::min(chunk, room));
      budget.charge(m.st.size() - before);
    }
    return m.st.inv[v];
  }

  std::vector<index_t> prefix(index_t len) {
    ensure(len);
    const auto& f = impl().st.fwd;
    return {f.begin(), f.begin() + static_cast<std::ptrdiff_t>(len)};
  }

  bool valid() const { return impl_ != nullptr; }

 private:
  struct Impl {
    std::string name;
    Extender ext;
    State st;
  };
  Impl& impl() const {
    if (!impl_) throw Error(ErrorKind::PermUndefined, "empty permutation program");
    return *impl_;
  }
  std::shared_ptr<Impl> impl_;
};

namespace perms {

// Permutation given by a closed-form rule, which must itself be a bijection.
inline PermutationProg from_rule(std::string name, std::function<index_t(index_t)> rule) {
  return PermutationProg(std::move(name),
                         [rule = std::move(rule)](PermutationProg::State& s, index_t want) {
                           index_t target = std::max<index_t>(want, s.size() + 256);
                           while (s.size() < target) s.push(rule(s.size()));
                         });
}

inline PermutationProg identity() {
  return from_rule("identity", [](index_t n) { return n; });
}

inline PermutationProg swap_pairs() {
  return from_rule("swap-pairs", [](index_t n) { return n ^ 1; });
}

inline PermutationProg block_reverse(index_t w) {
  if (w == 0) throw Error(ErrorKind::Precondition, "block width must be >= 1");
  // Extension works a whole block at a time so the prefix stays a bijection
  // onto an initial segment.
  return PermutationProg("block-reverse:" + std::to_string(w),
                         [w](PermutationProg::State& s, index_t want) {
                           while (s.size() < want) {
                             index_t b = s.size();
                             for (index_t i = 0; i < w; ++i) s.push(b + w - 1 - i);
                           }
                         });
}

// Fixed finite prefix extended by the identity.
inline PermutationProg from_prefix(std::string name, std::vector<index_t> head) {
  return PermutationProg(std::move(name),
                         [head = std::move(head)](PermutationProg::State& s, index_t want) {
                           if (s.size() == 0) {
                             std::vector<index_t> sorted(head);
                             std::sort(sorted.begin(), sorted.end());
                             for (index_t i = 0; i < sorted.size(); ++i)
                               if (sorted[i] != i)
                                 throw Error(ErrorKind::Precondition,
                                             "prefix is not a permutation of [0, n)");
                             for (index_t v : head) s.push(v);
                           }
                           while (s.size() < want) s.push(s.size());
                         });
}

}  // namespace perms

}  // namespace rlab
