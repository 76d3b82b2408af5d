#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "llxscx/multiset/key.hpp"
#include "llxscx/primitives.hpp"
#include "llxscx/process.hpp"

namespace llxscx::multiset {

/// Layout of a list node: mutable {count, next}, immutable {key kind, key value}.
const RecordSchema& node_schema();

inline constexpr std::size_t kCountField = 0;
inline constexpr std::size_t kNextField = 1;

Key node_key(const DataRecord* node);

/// Per-operation counters, accumulated per process by the caller.
struct OpStats {
  std::uint64_t attempts = 0;  // loop iterations, so retries = attempts - 1
  std::uint64_t saturated = 0;
};

/// Non-blocking multiset on a sorted singly-linked list with sentinel nodes,
/// synchronized with LLX/SCX. Any number of processes of the creator's
/// Domain may call the operations concurrently.
class MultisetList {
 public:
  /// Allocates the two sentinels as records of `creator`.
  explicit MultisetList(Process& creator);

  MultisetList(const MultisetList&) = delete;
  MultisetList& operator=(const MultisetList&) = delete;

  DataRecord* head() const { return head_; }

  /// Plain reads only. Returns {r, p} with p.key < key <= r.key, where p.next
  /// was r at some point during the traversal.
  std::pair<DataRecord*, DataRecord*> search(Process& proc, std::int64_t key) const;

  std::uint64_t get(Process& proc, std::int64_t key) const;
  /// Adds `count` (> 0) occurrences. A count that would overflow saturates
  /// at the maximum and emits an audit warning.
  void insert(Process& proc, std::int64_t key, std::uint64_t count, OpStats* stats = nullptr);
  /// Removes `count` (> 0) occurrences if at least that many are present.
  bool remove(Process& proc, std::int64_t key, std::uint64_t count, OpStats* stats = nullptr);

  struct Entry {
    Key key;
    std::uint64_t count;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  /// The full chain from head, sentinels included. Quiescent use only.
  std::vector<Entry> audit_structure() const;
  /// The reachable nodes from head, sentinels included. Quiescent use only.
  std::vector<DataRecord*> reachable_nodes() const;
  /// Sorted-chain check on audit_structure(): keys strictly increase from
  /// -inf to +inf, sentinel counts are 0, client counts positive, and the
  /// last node has next = none. Returns an empty string when it holds.
  std::string check_sorted_chain() const;

 private:
  DataRecord* make_node(Process& proc, Key key, std::uint64_t count, DataRecord* next) const;

  DataRecord* head_;
};

}  // namespace llxscx::multiset
