#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "llxscx/word.hpp"

namespace llxscx {

class ScxRecord;

/// Shape of a user-defined Data-record type: the kind of each mutable field
/// and the number of immutable fields.
struct RecordSchema {
  std::string name;
  std::vector<FieldKind> mutable_fields;
  std::size_t immutable_count = 0;

  std::size_t mutable_count() const { return mutable_fields.size(); }
};

/// A Data-record: y mutable single-word fields, z immutable words, plus the
/// `info` pointer and `marked` bit used by LLX/SCX.
///
/// Records are never freed while their Domain is alive, so an address (and
/// therefore an info value) is never reused inside one run.
class DataRecord {
 public:
  DataRecord(const RecordSchema& schema, std::uint64_t id,
             std::span<const std::uint64_t> immutables,
             std::span<const Word> mutable_inits);

  DataRecord(const DataRecord&) = delete;
  DataRecord& operator=(const DataRecord&) = delete;

  const RecordSchema& schema() const { return *schema_; }
  std::uint64_t id() const { return id_; }

  /// Immutable fields never change, so reading one is not a shared step.
  std::uint64_t immutable(std::size_t i) const;

  // Raw shared state. Only primitives.cpp touches these.
  std::atomic<ScxRecord*>& info() { return info_; }
  std::atomic<bool>& marked() { return marked_; }
  std::atomic<std::uint64_t>& field(std::size_t i) { return mutables_[i]; }
  const std::atomic<std::uint64_t>& field(std::size_t i) const { return mutables_[i]; }

 private:
  const RecordSchema* schema_;
  std::uint64_t id_;
  std::vector<std::uint64_t> immutables_;
  std::unique_ptr<std::atomic<std::uint64_t>[]> mutables_;
  std::atomic<ScxRecord*> info_;
  std::atomic<bool> marked_{false};
};

/// Locates one mutable field of a record.
struct FieldRef {
  DataRecord* record = nullptr;
  std::size_t index = 0;
};

enum class ScxState : std::uint8_t { kInProgress, kCommitted, kAborted };

const char* to_string(ScxState s);

/// Descriptor of one SCX. Everything except `state` and `all_frozen` is
/// fixed at construction.
class ScxRecord {
 public:
  ScxRecord(std::uint64_t id, std::vector<DataRecord*> v, std::vector<DataRecord*> r,
            FieldRef fld, Word new_value, Word old_value,
            std::vector<ScxRecord*> info_fields);

  ScxRecord(const ScxRecord&) = delete;
  ScxRecord& operator=(const ScxRecord&) = delete;

  /// The shared dummy: state Aborted, allFrozen false, empty sequences.
  static ScxRecord* dummy();

  std::uint64_t id() const { return id_; }
  std::span<DataRecord* const> v() const { return v_; }
  std::span<DataRecord* const> r() const { return r_; }
  const FieldRef& fld() const { return fld_; }
  Word new_value() const { return new_; }
  Word old_value() const { return old_; }
  std::span<ScxRecord* const> info_fields() const { return info_fields_; }

  std::atomic<ScxState>& state() { return state_; }
  std::atomic<bool>& all_frozen() { return all_frozen_; }

 private:
  struct DummyTag {};
  explicit ScxRecord(DummyTag);

  std::uint64_t id_;
  std::vector<DataRecord*> v_;
  std::vector<DataRecord*> r_;
  FieldRef fld_;
  Word new_;
  Word old_;
  std::vector<ScxRecord*> info_fields_;
  std::atomic<ScxState> state_;
  std::atomic<bool> all_frozen_{false};
};

}  // namespace llxscx
