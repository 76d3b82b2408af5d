#include "llxscx/record.hpp"

#include "llxscx/step_hooks.hpp"

namespace llxscx {

DataRecord::DataRecord(const RecordSchema& schema, std::uint64_t id,
                       std::span<const std::uint64_t> immutables,
                       std::span<const Word> mutable_inits)
    : schema_(&schema),
      id_(id),
      immutables_(immutables.begin(), immutables.end()),
      mutables_(std::make_unique<std::atomic<std::uint64_t>[]>(mutable_inits.size())),
      info_(ScxRecord::dummy()) {
  LLXSCX_REQUIRE(immutables.size() == schema.immutable_count,
                 "immutable field count does not match schema " + schema.name);
  LLXSCX_REQUIRE(mutable_inits.size() == schema.mutable_count(),
                 "mutable field count does not match schema " + schema.name);
  for (std::size_t i = 0; i < mutable_inits.size(); ++i) {
    mutables_[i].store(mutable_inits[i].bits(), std::memory_order_relaxed);
  }
}

std::uint64_t DataRecord::immutable(std::size_t i) const {
  LLXSCX_REQUIRE(i < immutables_.size(), "immutable field index out of range");
  return immutables_[i];
}

const char* to_string(ScxState s) {
  switch (s) {
    case ScxState::kInProgress:
      return "InProgress";
    case ScxState::kCommitted:
      return "Committed";
    case ScxState::kAborted:
      return "Aborted";
  }
  return "?";
}

ScxRecord::ScxRecord(std::uint64_t id, std::vector<DataRecord*> v, std::vector<DataRecord*> r,
                     FieldRef fld, Word new_value, Word old_value,
                     std::vector<ScxRecord*> info_fields)
    : id_(id),
      v_(std::move(v)),
      r_(std::move(r)),
      fld_(fld),
      new_(new_value),
      old_(old_value),
      info_fields_(std::move(info_fields)),
      state_(ScxState::kInProgress) {}

ScxRecord::ScxRecord(DummyTag) : id_(0), fld_{}, state_(ScxState::kAborted) {}

ScxRecord* ScxRecord::dummy() {
  static ScxRecord instance{DummyTag{}};
  return &instance;
}

const char* to_string(Step s) {
  switch (s) {
    case Step::kReadMarked:
      return "read_marked";
    case Step::kReadInfo:
      return "read_info";
    case Step::kReadState:
      return "read_state";
    case Step::kReadField:
      return "read_field";
    case Step::kReadAllFrozen:
      return "frozen_check";
    case Step::kFreezingCas:
      return "freezing_cas";
    case Step::kFrozenStep:
      return "frozen_step";
    case Step::kMarkStep:
      return "mark_step";
    case Step::kUpdateCas:
      return "update_cas";
    case Step::kCommitStep:
      return "commit_step";
    case Step::kAbortStep:
      return "abort_step";
  }
  return "?";
}

namespace detail {
thread_local StepObserver* tls_step_observer = nullptr;
}

void set_thread_step_observer(StepObserver* observer) { detail::tls_step_observer = observer; }
StepObserver* thread_step_observer() { return detail::tls_step_observer; }

}  // namespace llxscx
