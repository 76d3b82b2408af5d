#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "llxscx/record.hpp"

namespace llxscx {

struct ProcessId {
  std::uint32_t value = 0;
  friend bool operator==(ProcessId, ProcessId) = default;
};

/// Shared-memory steps taken by one primitive invocation (including any
/// helping it does). Reset when the invocation starts.
struct StepCounters {
  std::uint64_t freezing_cas = 0;
  std::uint64_t update_cas = 0;
  std::uint64_t writes = 0;  // frozen, mark, commit and abort steps
  std::uint64_t shared_reads = 0;

  std::uint64_t cas_steps() const { return freezing_cas + update_cas; }
  friend bool operator==(const StepCounters&, const StepCounters&) = default;
};

/// Running totals over the life of a process, for reports.
struct ProcessTotals {
  std::uint64_t llx_calls = 0;
  std::uint64_t llx_fail = 0;
  std::uint64_t llx_finalized = 0;
  std::uint64_t scx_calls = 0;
  std::uint64_t scx_success = 0;
  std::uint64_t vlx_calls = 0;
  std::uint64_t vlx_success = 0;
  std::uint64_t freezing_cas_failures = 0;
  std::uint64_t update_cas_failures = 0;
};

/// Per-process memo of the latest successful LLX of each record.
class LlxTable {
 public:
  struct Entry {
    ScxRecord* info_seen = nullptr;
    std::vector<Word> snapshot;
  };

  void store(const DataRecord* r, ScxRecord* info, std::vector<Word> snapshot);
  const Entry* find(const DataRecord* r) const;
  void drop(const DataRecord* r);
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<const DataRecord*, Entry> entries_;
};

class Domain;

/// One of the N processes sharing a Domain. A Process is used by one thread
/// at a time; it owns its LLX table, step counters and the records and
/// descriptors it allocates.
class Process {
 public:
  Process(Domain& domain, ProcessId id);
  Process(const Process&) = delete;
  Process& operator=(const Process&) = delete;

  ProcessId id() const { return id_; }
  Domain& domain() const { return *domain_; }

  LlxTable& llx_table() { return table_; }
  const LlxTable& llx_table() const { return table_; }

  /// Counters of the most recent (or current) primitive invocation.
  const StepCounters& last_counters() const { return counters_; }
  StepCounters& counters() { return counters_; }
  const ProcessTotals& totals() const { return totals_; }
  ProcessTotals& totals() { return totals_; }

  DataRecord* allocate_record(const RecordSchema& schema,
                              std::span<const std::uint64_t> immutables,
                              std::span<const Word> mutable_inits);
  ScxRecord* allocate_descriptor(std::vector<DataRecord*> v, std::vector<DataRecord*> r,
                                 FieldRef fld, Word new_value, Word old_value,
                                 std::vector<ScxRecord*> info_fields);

  void for_each_record(const std::function<void(DataRecord&)>& fn) const;

 private:
  Domain* domain_;
  ProcessId id_;
  LlxTable table_;
  StepCounters counters_;
  ProcessTotals totals_;
  std::vector<std::unique_ptr<DataRecord>> records_;
  std::vector<std::unique_ptr<ScxRecord>> descriptors_;
};

/// Owns every process, record and descriptor of one shared structure.
/// Nothing is reclaimed before the Domain is destroyed, which must happen
/// only at quiescence.
class Domain {
 public:
  Domain();
  ~Domain();
  Domain(const Domain&) = delete;
  Domain& operator=(const Domain&) = delete;

  /// Adds a process. Returned reference stays valid for the Domain's life.
  Process& register_process();
  Process& process(std::size_t i);
  std::size_t process_count() const;

  std::uint64_t next_record_id() { return next_record_id_.fetch_add(1); }
  std::uint64_t next_descriptor_id() { return next_descriptor_id_.fetch_add(1); }

  /// Visits every record allocated so far. Quiescent use only.
  void for_each_record(const std::function<void(DataRecord&)>& fn) const;

 private:
  mutable std::mutex mu_;
  std::deque<std::unique_ptr<Process>> processes_;
  std::atomic<std::uint64_t> next_record_id_{1};
  std::atomic<std::uint64_t> next_descriptor_id_{1};  // 0 is the dummy
};

}  // namespace llxscx
