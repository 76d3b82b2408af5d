#pragma once

#include <cstdint>
#include <string>

#include "llxscx/harness/history.hpp"

namespace llxscx::harness {

enum class Verdict : std::uint8_t { kLinearizable, kNotLinearizable, kBudgetExhausted };

const char* to_string(Verdict v);

struct CheckOptions {
  /// Upper bound on linearization attempts summed over all keys.
  std::uint64_t budget = 50'000'000;
};

struct CheckResult {
  Verdict verdict = Verdict::kLinearizable;
  std::uint64_t explored = 0;
  /// Key whose sub-history failed, when not linearizable.
  std::int64_t failing_key = 0;
};

/// Decides whether some total order of the history's operations respects
/// real-time precedence and replays against SequentialMultiset. Pending
/// operations may be linearized (with any response) or left out.
///
/// The history is split per key (each operation touches one key, and
/// linearizability is local), and each part is searched depth-first in
/// the style of Wing & Gong with Lowe's memoization of (linearized set,
/// count) states.
CheckResult check_linearizable(const History& h, const CheckOptions& opts = {});

}  // namespace llxscx::harness
