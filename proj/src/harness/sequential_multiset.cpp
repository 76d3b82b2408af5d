#include "llxscx/harness/sequential_multiset.hpp"

#include <limits>

namespace llxscx::harness {

CountTransition apply_to_count(std::uint64_t count, OpKind op, std::uint64_t arg) {
  switch (op) {
    case OpKind::kGet:
      return {count, count};
    case OpKind::kInsert: {
      constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
      return {arg > kMax - count ? kMax : count + arg, std::nullopt};
    }
    case OpKind::kDelete:
      if (count >= arg) return {count - arg, 1};
      return {count, 0};
  }
  return {count, std::nullopt};
}

std::optional<std::uint64_t> SequentialMultiset::apply(OpKind op, std::int64_t key,
                                                       std::uint64_t arg) {
  const auto [next, response] = apply_to_count(count(key), op, arg);
  if (next == 0) {
    counts_.erase(key);
  } else {
    counts_[key] = next;
  }
  return response;
}

std::pair<SequentialMultiset, std::optional<std::uint64_t>> oracle_apply(
    SequentialMultiset state, OpKind op, std::int64_t key, std::uint64_t arg) {
  auto response = state.apply(op, key, arg);
  return {std::move(state), response};
}

}  // namespace llxscx::harness
