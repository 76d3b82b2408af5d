#include "llxscx/primitives.hpp"

#include <algorithm>
#include <utility>

#include "llxscx/audit_log.hpp"
#include "llxscx/step_hooks.hpp"

namespace llxscx {
namespace {

constexpr auto kSeqCst = std::memory_order_seq_cst;

using detail::yield_point;

// Runs one shared step; when auditing, the step and its event are appended
// atomically with respect to every other audited step.
template <class Op, class MakeEvent>
auto audited(Op&& op, MakeEvent&& make_event) {
  if (!audit::enabled()) return op();
  auto guard = audit::lock();
  auto result = op();
  audit::emit_locked(make_event(result));
  return result;
}

std::uint64_t loggable(const DataRecord* owner, std::size_t field, Word w) {
  if (owner->schema().mutable_fields[field] == FieldKind::kHandle) {
    const DataRecord* target = w.as_handle();
    return target == nullptr ? 0 : target->id();
  }
  return w.as_value();
}

std::vector<std::uint64_t> ids_of(std::span<DataRecord* const> rs) {
  std::vector<std::uint64_t> out;
  out.reserve(rs.size());
  for (const auto* r : rs) out.push_back(r->id());
  return out;
}

audit::Event event(audit::EventKind kind, const Process& proc) {
  audit::Event e;
  e.kind = kind;
  e.process = proc.id().value;
  return e;
}

bool read_marked(Process& proc, DataRecord* r) {
  yield_point(Step::kReadMarked);
  ++proc.counters().shared_reads;
  return r->marked().load(kSeqCst);
}

ScxRecord* read_info(Process& proc, DataRecord* r) {
  yield_point(Step::kReadInfo);
  ++proc.counters().shared_reads;
  return r->info().load(kSeqCst);
}

ScxState read_state(Process& proc, ScxRecord* u) {
  yield_point(Step::kReadState);
  ++proc.counters().shared_reads;
  return u->state().load(kSeqCst);
}

Word read_mutable(Process& proc, const DataRecord* r, std::size_t i) {
  yield_point(Step::kReadField);
  ++proc.counters().shared_reads;
  return Word::from_bits(r->field(i).load(kSeqCst));
}

void log_llx(const Process& proc, const DataRecord* r, const ScxRecord* info,
             LlxResult::Kind kind) {
  if (!audit::enabled()) return;
  auto guard = audit::lock();
  auto e = event(audit::EventKind::kLlxReturn, proc);
  e.record = r->id();
  e.descriptor = info->id();
  e.value = static_cast<std::uint64_t>(kind);
  audit::emit_locked(std::move(e));
}

}  // namespace

const char* to_string(LlxResult::Kind k) {
  switch (k) {
    case LlxResult::Kind::kSnapshot:
      return "Snapshot";
    case LlxResult::Kind::kFail:
      return "Fail";
    case LlxResult::Kind::kFinalized:
      return "Finalized";
  }
  return "?";
}

DataRecord* new_record(Process& proc, const RecordSchema& schema,
                       std::span<const std::uint64_t> immutables,
                       std::span<const Word> mutable_inits) {
  DataRecord* r = proc.allocate_record(schema, immutables, mutable_inits);
  if (audit::enabled()) {
    auto guard = audit::lock();
    auto e = event(audit::EventKind::kRecordCreate, proc);
    e.record = r->id();
    for (std::size_t i = 0; i < mutable_inits.size(); ++i) {
      e.values.push_back(loggable(r, i, mutable_inits[i]));
    }
    audit::emit_locked(std::move(e));
  }
  return r;
}

LlxResult llx(Process& proc, DataRecord* r) {
  LLXSCX_REQUIRE(r != nullptr, "llx on a null record");
  proc.counters() = {};
  ++proc.totals().llx_calls;

  const bool marked1 = read_marked(proc, r);
  ScxRecord* rinfo = read_info(proc, r);
  const ScxState state = read_state(proc, rinfo);
  const bool marked2 = read_marked(proc, r);

  // r was not frozen when `state` was read.
  if (state == ScxState::kAborted || (state == ScxState::kCommitted && !marked2)) {
    const std::size_t y = r->schema().mutable_count();
    std::vector<Word> words;
    words.reserve(y);
    for (std::size_t i = 0; i < y; ++i) words.push_back(read_mutable(proc, r, i));
    if (read_info(proc, r) == rinfo) {
      proc.llx_table().store(r, rinfo, words);
      log_llx(proc, r, rinfo, LlxResult::Kind::kSnapshot);
      return LlxResult::snapshot(std::move(words));
    }
  }

  proc.llx_table().drop(r);

  bool committed = read_state(proc, rinfo) == ScxState::kCommitted;
  if (!committed) {
    committed = read_state(proc, rinfo) == ScxState::kInProgress && help(proc, rinfo);
  }
  if (committed && marked1) {
    ++proc.totals().llx_finalized;
    log_llx(proc, r, rinfo, LlxResult::Kind::kFinalized);
    return LlxResult::finalized();
  }

  ScxRecord* current = read_info(proc, r);
  if (read_state(proc, current) == ScxState::kInProgress) help(proc, current);
  ++proc.totals().llx_fail;
  log_llx(proc, r, rinfo, LlxResult::Kind::kFail);
  return LlxResult::fail();
}

bool scx(Process& proc, std::span<DataRecord* const> V, std::span<DataRecord* const> R,
         FieldRef fld, Word new_value) {
  LLXSCX_REQUIRE(fld.record != nullptr, "scx field has no record");
  LLXSCX_REQUIRE(fld.index < fld.record->schema().mutable_count(),
                 "scx field index out of range");
  LLXSCX_REQUIRE(std::find(V.begin(), V.end(), fld.record) != V.end(),
                 "scx field must belong to a record in V");
  for (std::size_t i = 0; i < V.size(); ++i) {
    LLXSCX_REQUIRE(V[i] != nullptr, "null record in V");
    LLXSCX_REQUIRE(std::find(V.begin() + i + 1, V.end(), V[i]) == V.end(),
                   "duplicate record in V");
  }
  {
    // R must be a subsequence of V.
    std::size_t pos = 0;
    for (auto* r : R) {
      while (pos < V.size() && V[pos] != r) ++pos;
      LLXSCX_REQUIRE(pos < V.size(), "R is not a subsequence of V");
      ++pos;
    }
  }

  std::vector<ScxRecord*> info_fields;
  info_fields.reserve(V.size());
  Word old_value;
  for (auto* r : V) {
    const auto* entry = proc.llx_table().find(r);
    LLXSCX_REQUIRE(entry != nullptr, "scx without a linked llx for a record in V");
    info_fields.push_back(entry->info_seen);
    if (r == fld.record) old_value = entry->snapshot[fld.index];
  }
  for (auto* r : V) proc.llx_table().drop(r);

  proc.counters() = {};
  ++proc.totals().scx_calls;

  ScxRecord* u = proc.allocate_descriptor({V.begin(), V.end()}, {R.begin(), R.end()}, fld,
                                          new_value, old_value, std::move(info_fields));
  if (audit::enabled()) {
    auto guard = audit::lock();
    auto e = event(audit::EventKind::kScxCreate, proc);
    e.descriptor = u->id();
    e.record = fld.record->id();
    e.field = fld.index;
    e.value = loggable(fld.record, fld.index, new_value);
    e.v = ids_of(V);
    e.r = ids_of(R);
    audit::emit_locked(std::move(e));
  }

  const bool ok = help(proc, u);
  if (ok) ++proc.totals().scx_success;
  return ok;
}

bool help(Process& proc, ScxRecord* u) {
  LLXSCX_REQUIRE(u != nullptr && u != ScxRecord::dummy(), "help on the dummy descriptor");
  auto finish = [&](bool result) {
    if (audit::enabled()) {
      auto guard = audit::lock();
      auto e = event(audit::EventKind::kHelpReturn, proc);
      e.descriptor = u->id();
      e.ok = result;
      audit::emit_locked(std::move(e));
    }
    return result;
  };

  const auto v = u->v();
  const auto info_fields = u->info_fields();
  for (std::size_t i = 0; i < v.size(); ++i) {
    DataRecord* r = v[i];
    ScxRecord* rinfo = info_fields[i];

    yield_point(Step::kFreezingCas);
    ++proc.counters().freezing_cas;
    const bool frozen = audited(
        [&] { return r->info().compare_exchange_strong(rinfo, u, kSeqCst); },
        [&](bool ok) {
          auto e = event(audit::EventKind::kFreezingCas, proc);
          e.record = r->id();
          e.descriptor = u->id();
          e.step = static_cast<std::int64_t>(i);
          e.ok = ok;
          return e;
        });
    if (frozen) continue;
    ++proc.totals().freezing_cas_failures;

    if (read_info(proc, r) != u) {
      // r is frozen for some other SCX.
      yield_point(Step::kReadAllFrozen);
      ++proc.counters().shared_reads;
      const bool all_frozen = audited([&] { return u->all_frozen().load(kSeqCst); },
                                      [&](bool af) {
                                        auto e = event(audit::EventKind::kFrozenCheck, proc);
                                        e.descriptor = u->id();
                                        e.ok = af;
                                        return e;
                                      });
      if (all_frozen) return finish(true);

      yield_point(Step::kAbortStep);
      ++proc.counters().writes;
      audited(
          [&] {
            u->state().store(ScxState::kAborted, kSeqCst);
            return true;
          },
          [&](bool) {
            auto e = event(audit::EventKind::kAbortStep, proc);
            e.descriptor = u->id();
            return e;
          });
      return finish(false);
    }
  }

  yield_point(Step::kFrozenStep);
  ++proc.counters().writes;
  audited(
      [&] {
        u->all_frozen().store(true, kSeqCst);
        return true;
      },
      [&](bool) {
        auto e = event(audit::EventKind::kFrozenStep, proc);
        e.descriptor = u->id();
        return e;
      });

  const auto rs = u->r();
  for (std::size_t i = 0; i < rs.size(); ++i) {
    yield_point(Step::kMarkStep);
    ++proc.counters().writes;
    audited(
        [&] {
          rs[i]->marked().store(true, kSeqCst);
          return true;
        },
        [&](bool) {
          auto e = event(audit::EventKind::kMarkStep, proc);
          e.descriptor = u->id();
          e.record = rs[i]->id();
          e.step = static_cast<std::int64_t>(i);
          return e;
        });
  }

  const FieldRef& fld = u->fld();
  yield_point(Step::kUpdateCas);
  ++proc.counters().update_cas;
  std::uint64_t expected = u->old_value().bits();
  const bool updated = audited(
      [&] {
        return fld.record->field(fld.index).compare_exchange_strong(
            expected, u->new_value().bits(), kSeqCst);
      },
      [&](bool ok) {
        auto e = event(audit::EventKind::kUpdateCas, proc);
        e.descriptor = u->id();
        e.record = fld.record->id();
        e.field = fld.index;
        e.ok = ok;
        e.value = loggable(fld.record, fld.index, u->new_value());
        return e;
      });
  if (!updated) ++proc.totals().update_cas_failures;

  yield_point(Step::kCommitStep);
  ++proc.counters().writes;
  audited(
      [&] {
        u->state().store(ScxState::kCommitted, kSeqCst);
        return true;
      },
      [&](bool) {
        auto e = event(audit::EventKind::kCommitStep, proc);
        e.descriptor = u->id();
        return e;
      });
  return finish(true);
}

bool vlx(Process& proc, std::span<DataRecord* const> V) {
  std::vector<ScxRecord*> seen;
  seen.reserve(V.size());
  for (auto* r : V) {
    const auto* entry = proc.llx_table().find(r);
    LLXSCX_REQUIRE(entry != nullptr, "vlx without a linked llx for a record in V");
    seen.push_back(entry->info_seen);
  }
  proc.counters() = {};
  ++proc.totals().vlx_calls;

  bool ok = true;
  for (std::size_t i = 0; i < V.size(); ++i) {
    if (read_info(proc, V[i]) != seen[i]) {
      ok = false;
      break;
    }
  }
  if (!ok) {
    // An unsuccessful VLX ends the link for every record it named.
    for (auto* r : V) proc.llx_table().drop(r);
  } else {
    ++proc.totals().vlx_success;
  }
  if (audit::enabled()) {
    auto guard = audit::lock();
    auto e = event(audit::EventKind::kVlxReturn, proc);
    e.ok = ok;
    e.v = ids_of(V);
    audit::emit_locked(std::move(e));
  }
  return ok;
}

Word read_field(Process& proc, const DataRecord* r, Field which) {
  LLXSCX_REQUIRE(r != nullptr, "read of a null record");
  if (which.kind == Field::Kind::kImmutable) {
    return Word::value(r->immutable(which.index));
  }
  LLXSCX_REQUIRE(which.index < r->schema().mutable_count(), "mutable field index out of range");
  return read_mutable(proc, r, which.index);
}

bool is_frozen(const DataRecord* r) {
  auto* rec = const_cast<DataRecord*>(r);
  ScxRecord* info = rec->info().load(kSeqCst);
  const ScxState s = info->state().load(kSeqCst);
  return s == ScxState::kInProgress || (s == ScxState::kCommitted && rec->marked().load(kSeqCst));
}

}  // namespace llxscx
