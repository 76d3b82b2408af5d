#include "llxscx/harness/checker.hpp"

#include <algorithm>
#include <span>
#include <unordered_set>

#include "llxscx/harness/sequential_multiset.hpp"

namespace llxscx::harness {
namespace {

// Doubly linked list of call/return entries ordered by seq, as in Lowe's
// formulation. Pending operations contribute a call entry only.
struct Entry {
  std::size_t op;
  bool is_call;
  Entry* prev = nullptr;
  Entry* next = nullptr;
  Entry* match = nullptr;  // call -> its return (null if pending)
};

struct StateKey {
  std::vector<std::uint64_t> bits;
  std::uint64_t count;
  friend bool operator==(const StateKey&, const StateKey&) = default;
};

std::uint64_t mix_words(std::uint64_t h, std::uint64_t w) {
  return h ^ (w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const {
    std::uint64_t h = k.count * 0x9e3779b97f4a7c15ULL;
    for (auto w : k.bits) h = mix_words(h, w);
    return static_cast<std::size_t>(h);
  }
};

using SmallKey = std::pair<std::uint64_t, std::uint64_t>;  // (bits, count)

struct SmallKeyHash {
  std::size_t operator()(const SmallKey& k) const {
    return static_cast<std::size_t>(mix_words(k.second * 0x9e3779b97f4a7c15ULL, k.first));
  }
};

class Bitset {
 public:
  explicit Bitset(std::size_t n) : words_((n + 63) / 64, 0) {}
  void set(std::size_t i) { words_[i / 64] |= (1ULL << (i % 64)); }
  void clear(std::size_t i) { words_[i / 64] &= ~(1ULL << (i % 64)); }
  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  std::vector<std::uint64_t> words_;
};

// Visited (linearized set, count) states. Partitions of at most 64
// operations key on a single word.
class Memo {
 public:
  explicit Memo(std::size_t n) : small_(n <= 64) {}

  bool insert(const Bitset& linearized, std::uint64_t count) {
    if (small_) return small_seen_.insert({linearized.words()[0], count}).second;
    return seen_.insert(StateKey{linearized.words(), count}).second;
  }

 private:
  bool small_;
  std::unordered_set<SmallKey, SmallKeyHash> small_seen_;
  std::unordered_set<StateKey, StateKeyHash> seen_;
};

void lift(Entry* call) {
  call->prev->next = call->next;
  if (call->next) call->next->prev = call->prev;
  if (Entry* ret = call->match) {
    ret->prev->next = ret->next;
    if (ret->next) ret->next->prev = ret->prev;
  }
}

void unlift(Entry* call) {
  if (Entry* ret = call->match) {
    ret->prev->next = ret;
    if (ret->next) ret->next->prev = ret;
  }
  call->prev->next = call;
  if (call->next) call->next->prev = call;
}

// Searches one key's operations. Returns kBudgetExhausted when `budget`
// runs out; `explored` accumulates attempts.
Verdict check_partition(std::span<const Operation> ops, std::uint64_t& budget,
                        std::uint64_t& explored) {
  const std::size_t n = ops.size();
  std::vector<Entry> entries;
  entries.reserve(2 * n + 1);
  struct Timed {
    std::uint64_t seq;
    std::size_t op;
    bool is_call;
  };
  std::vector<Timed> order;
  order.reserve(2 * n);
  std::size_t completed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    order.push_back({ops[i].invoke_seq, i, true});
    if (!ops[i].pending()) {
      order.push_back({*ops[i].respond_seq, i, false});
      ++completed;
    }
  }
  std::sort(order.begin(), order.end(), [](const Timed& a, const Timed& b) { return a.seq < b.seq; });

  entries.push_back({n, false});  // sentinel head
  std::vector<Entry*> call_of(n, nullptr);
  for (const auto& t : order) entries.push_back({t.op, t.is_call});
  for (std::size_t i = 1; i < entries.size(); ++i) {
    entries[i].prev = &entries[i - 1];
    entries[i - 1].next = &entries[i];
    if (entries[i].is_call) call_of[entries[i].op] = &entries[i];
  }
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (!entries[i].is_call) call_of[entries[i].op]->match = &entries[i];
  }
  Entry* const head = &entries[0];

  struct Frame {
    Entry* call;
    std::uint64_t prev_count;
  };
  std::vector<Frame> stack;
  Memo seen(n);
  Bitset linearized(n);
  std::uint64_t count = 0;
  std::size_t remaining = completed;

  Entry* entry = head->next;
  for (;;) {
    if (remaining == 0) return Verdict::kLinearizable;
    if (entry == nullptr) {
      // Only pending calls were left to try; treat like reaching a return.
      entry = head;  // fallthrough into backtrack below
    }
    if (entry != head && entry->is_call) {
      if (budget == 0) return Verdict::kBudgetExhausted;
      --budget;
      ++explored;
      const Operation& op = ops[entry->op];
      const auto t = apply_to_count(count, op.op, op.count);
      const bool matches = op.pending() || t.response == op.response;
      bool advanced = false;
      if (matches) {
        linearized.set(entry->op);
        if (seen.insert(linearized, t.count)) {
          stack.push_back({entry, count});
          count = t.count;
          if (!op.pending()) --remaining;
          lift(entry);
          entry = head->next;
          advanced = true;
        } else {
          linearized.clear(entry->op);
        }
      }
      if (!advanced) entry = entry->next;
      continue;
    }
    // A return entry (or the end): the op it closes must already have been
    // linearized, so undo the most recent choice.
    if (stack.empty()) return Verdict::kNotLinearizable;
    Frame f = stack.back();
    stack.pop_back();
    count = f.prev_count;
    linearized.clear(f.call->op);
    if (!ops[f.call->op].pending()) ++remaining;
    unlift(f.call);
    entry = f.call->next;
  }
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kLinearizable:
      return "linearizable";
    case Verdict::kNotLinearizable:
      return "not linearizable";
    case Verdict::kBudgetExhausted:
      return "budget exhausted";
  }
  return "?";
}

CheckResult check_linearizable(const History& h, const CheckOptions& opts) {
  auto ops = to_operations(h);
  // Group by key, keeping invoke order within each key.
  std::stable_sort(ops.begin(), ops.end(),
                   [](const Operation& a, const Operation& b) { return a.key < b.key; });

  CheckResult result;
  std::uint64_t budget = opts.budget;
  for (auto first = ops.begin(); first != ops.end();) {
    auto last = std::find_if(first, ops.end(),
                             [&](const Operation& op) { return op.key != first->key; });
    const Verdict v = check_partition({first, last}, budget, result.explored);
    if (v != Verdict::kLinearizable) {
      result.verdict = v;
      result.failing_key = first->key;
      return result;
    }
    first = last;
  }
  return result;
}

}  // namespace llxscx::harness
