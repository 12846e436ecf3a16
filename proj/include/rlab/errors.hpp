#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace rlab {

enum class ErrorKind {
  Parse,
  Precondition,
  PermUndefined,
  TermUndefined,
  InsufficientData,
  NotIncreasing,
  ExhaustedSign,
  SearchBudgetExceeded,
  BudgetExceeded,
  MalformedTrace,
  NoOracle,
  LevelMissing,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Precondition: return "Precondition";
    case ErrorKind::PermUndefined: return "PermUndefined";
    case ErrorKind::TermUndefined: return "TermUndefined";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::NotIncreasing: return "NotIncreasing";
    case ErrorKind::ExhaustedSign: return "ExhaustedSign";
    case ErrorKind::SearchBudgetExceeded: return "SearchBudgetExceeded";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::MalformedTrace: return "MalformedTrace";
    case ErrorKind::NoOracle: return "NoOracle";
    case ErrorKind::LevelMissing: return "LevelMissing";
  }
  return "?";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Step limit for searches that may not terminate on bad input.
// RLAB_BUDGET overrides the default of 10^7.
inline std::uint64_t default_budget() {
  if (const char* env = std::getenv("RLAB_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return 10'000'000ULL;
}

class Budget {
 public:
  explicit Budget(std::uint64_t limit = default_budget(),
                  ErrorKind on_exhaust = ErrorKind::SearchBudgetExceeded)
      : limit_(limit), kind_(on_exhaust) {}

  void charge(std::uint64_t steps = 1) {
    used_ += steps;
    if (used_ > limit_)
      throw Error(kind_, "budget of " + std::to_string(limit_) + " steps exhausted");
  }
  std::uint64_t used() const { return used_; }
  std::uint64_t limit() const { return limit_; }

 private:
  std::uint64_t limit_;
  std::uint64_t used_ = 0;
  ErrorKind kind_;
};

}  // namespace rlab
