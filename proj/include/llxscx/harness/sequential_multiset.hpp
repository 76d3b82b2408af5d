#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>

#include "llxscx/harness/history.hpp"

namespace llxscx::harness {

/// Result of applying one operation to a single key's count.
struct CountTransition {
  std::uint64_t count;
  std::optional<std::uint64_t> response;  // none for insert
};

/// The multiset ADT restricted to one key. Insert saturates at the maximum
/// count, like the concurrent list.
CountTransition apply_to_count(std::uint64_t count, OpKind op, std::uint64_t arg);

/// Brute-force sequential multiset: the reference the checker replays.
class SequentialMultiset {
 public:
  std::uint64_t count(std::int64_t key) const {
    auto it = counts_.find(key);
    return it == counts_.end() ? 0 : it->second;
  }
  const std::map<std::int64_t, std::uint64_t>& contents() const { return counts_; }

  /// Mutates in place and returns the response.
  std::optional<std::uint64_t> apply(OpKind op, std::int64_t key, std::uint64_t arg);

  friend bool operator==(const SequentialMultiset&, const SequentialMultiset&) = default;

 private:
  std::map<std::int64_t, std::uint64_t> counts_;  // never holds a zero count
};

/// Pure transition: returns the next state and the response.
std::pair<SequentialMultiset, std::optional<std::uint64_t>> oracle_apply(
    SequentialMultiset state, OpKind op, std::int64_t key, std::uint64_t arg = 0);

}  // namespace llxscx::harness
