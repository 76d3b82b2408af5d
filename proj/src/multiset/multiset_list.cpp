#include "llxscx/multiset/multiset_list.hpp"

#include <array>
#include <limits>
#include <sstream>

#include "llxscx/audit_log.hpp"

namespace llxscx::multiset {
namespace {

constexpr auto kMaxCount = std::numeric_limits<std::uint64_t>::max();

void warn_saturated(const Process& proc, const DataRecord* node) {
  if (!audit::enabled()) return;
  auto guard = audit::lock();
  audit::Event e;
  e.kind = audit::EventKind::kWarning;
  e.process = proc.id().value;
  e.record = node->id();
  e.value = kMaxCount;
  audit::emit_locked(std::move(e));
}

Word next_of(Process& proc, const DataRecord* node) {
  return read_field(proc, node, Field::mut(kNextField));
}

}  // namespace

const RecordSchema& node_schema() {
  static const RecordSchema schema{"Node", {FieldKind::kValue, FieldKind::kHandle}, 2};
  return schema;
}

Key node_key(const DataRecord* node) {
  const auto kind = static_cast<Key::Kind>(node->immutable(0));
  switch (kind) {
    case Key::Kind::kNegInf:
      return Key::neg_inf();
    case Key::Kind::kPosInf:
      return Key::pos_inf();
    case Key::Kind::kClient:
      break;
  }
  return Key::client(static_cast<std::int64_t>(node->immutable(1)));
}

MultisetList::MultisetList(Process& creator) {
  DataRecord* tail = make_node(creator, Key::pos_inf(), 0, nullptr);
  head_ = make_node(creator, Key::neg_inf(), 0, tail);
}

DataRecord* MultisetList::make_node(Process& proc, Key key, std::uint64_t count,
                                    DataRecord* next) const {
  const std::array<std::uint64_t, 2> imm{static_cast<std::uint64_t>(key.kind()),
                                         static_cast<std::uint64_t>(key.value())};
  const std::array<Word, 2> mut{Word::value(count), Word::handle(next)};
  return new_record(proc, node_schema(), imm, mut);
}

std::pair<DataRecord*, DataRecord*> MultisetList::search(Process& proc, std::int64_t key) const {
  const Key k = Key::client(key);
  DataRecord* p = head_;
  DataRecord* r = next_of(proc, p).as_handle();
  while (k > node_key(r)) {
    p = r;
    r = next_of(proc, r).as_handle();
  }
  return {r, p};
}

std::uint64_t MultisetList::get(Process& proc, std::int64_t key) const {
  auto [r, p] = search(proc, key);
  if (node_key(r) == Key::client(key)) {
    return read_field(proc, r, Field::mut(kCountField)).as_value();
  }
  return 0;
}

void MultisetList::insert(Process& proc, std::int64_t key, std::uint64_t count, OpStats* stats) {
  LLXSCX_REQUIRE(count > 0, "insert count must be positive");
  OpStats local;
  OpStats& st = stats != nullptr ? *stats : local;
  for (;;) {
    ++st.attempts;
    auto [r, p] = search(proc, key);
    if (node_key(r) == Key::client(key)) {
      const LlxResult local_r = llx(proc, r);
      if (!local_r.is_snapshot()) continue;
      const std::uint64_t old = local_r[kCountField].as_value();
      if (old == kMaxCount) {
        ++st.saturated;
        warn_saturated(proc, r);
        return;
      }
      const std::uint64_t updated = count > kMaxCount - old ? kMaxCount : old + count;
      if (updated == kMaxCount) {
        ++st.saturated;
        warn_saturated(proc, r);
      }
      const std::array<DataRecord*, 1> v{r};
      if (scx(proc, v, {}, FieldRef{r, kCountField}, Word::value(updated))) return;
    } else {
      const LlxResult local_p = llx(proc, p);
      if (!local_p.is_snapshot() || local_p[kNextField].as_handle() != r) continue;
      DataRecord* fresh = make_node(proc, Key::client(key), count, r);
      const std::array<DataRecord*, 1> v{p};
      if (scx(proc, v, {}, FieldRef{p, kNextField}, Word::handle(fresh))) return;
    }
  }
}

bool MultisetList::remove(Process& proc, std::int64_t key, std::uint64_t count, OpStats* stats) {
  LLXSCX_REQUIRE(count > 0, "remove count must be positive");
  OpStats local;
  OpStats& st = stats != nullptr ? *stats : local;
  for (;;) {
    ++st.attempts;
    auto [r, p] = search(proc, key);
    const LlxResult local_p = llx(proc, p);
    const LlxResult local_r = llx(proc, r);
    if (!local_p.is_snapshot() || !local_r.is_snapshot() ||
        local_p[kNextField].as_handle() != r) {
      continue;
    }
    const Key rkey = node_key(r);
    const std::uint64_t rcount = local_r[kCountField].as_value();
    if (rkey != Key::client(key) || rcount < count) return false;

    DataRecord* rnext = local_r[kNextField].as_handle();
    if (rcount > count) {
      // Replace r by a copy carrying the reduced count.
      DataRecord* fresh = make_node(proc, rkey, rcount - count, rnext);
      const std::array<DataRecord*, 2> v{p, r};
      const std::array<DataRecord*, 1> rm{r};
      if (scx(proc, v, rm, FieldRef{p, kNextField}, Word::handle(fresh))) return true;
    } else {
      // Unlink r, replacing its successor by a fresh copy.
      const LlxResult local_next = llx(proc, rnext);
      if (!local_next.is_snapshot()) continue;
      DataRecord* copy = make_node(proc, node_key(rnext), local_next[kCountField].as_value(),
                                   local_next[kNextField].as_handle());
      const std::array<DataRecord*, 3> v{p, r, rnext};
      const std::array<DataRecord*, 2> rm{r, rnext};
      if (scx(proc, v, rm, FieldRef{p, kNextField}, Word::handle(copy))) return true;
    }
  }
}

std::vector<DataRecord*> MultisetList::reachable_nodes() const {
  std::vector<DataRecord*> out;
  for (DataRecord* n = head_; n != nullptr;
       n = Word::from_bits(n->field(kNextField).load()).as_handle()) {
    out.push_back(n);
  }
  return out;
}

std::vector<MultisetList::Entry> MultisetList::audit_structure() const {
  std::vector<Entry> out;
  for (DataRecord* n : reachable_nodes()) {
    out.push_back({node_key(n), n->field(kCountField).load()});
  }
  return out;
}

std::string MultisetList::check_sorted_chain() const {
  const auto nodes = reachable_nodes();
  std::ostringstream err;
  if (nodes.size() < 2) return "chain shorter than the two sentinels";
  if (node_key(nodes.front()) != Key::neg_inf()) return "chain does not start at -inf";
  const DataRecord* last = nodes.back();
  if (node_key(last) != Key::pos_inf()) {
    err << "chain ends at key " << node_key(last) << " instead of +inf";
    return err.str();
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Key k = node_key(nodes[i]);
    const std::uint64_t c = nodes[i]->field(kCountField).load();
    if (k.is_client() ? c == 0 : c != 0) {
      err << "node " << k << " has count " << c;
      return err.str();
    }
    if (i > 0 && !(node_key(nodes[i - 1]) < k)) {
      err << "keys not strictly increasing at " << node_key(nodes[i - 1]) << " -> " << k;
      return err.str();
    }
    if (nodes[i]->marked().load()) {
      err << "reachable node " << k << " is marked";
      return err.str();
    }
  }
  return {};
}

}  // namespace llxscx::multiset
