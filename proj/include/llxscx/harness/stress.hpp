#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "llxscx/harness/history.hpp"
#include "llxscx/multiset/locked_multiset.hpp"
#include "llxscx/multiset/multiset_list.hpp"

namespace llxscx::harness {

struct OpMix {
  unsigned get = 34;
  unsigned insert = 33;
  unsigned del = 33;
};

struct StressConfig {
  std::size_t processes = 4;
  std::size_t ops_per_process = 1000;
  std::uint64_t key_range = 8;
  OpMix mix;
  std::uint64_t seed = 1;
  bool record_history = true;
  /// Run under the ControlledScheduler (deterministic) instead of free threads.
  bool controlled = false;
  /// Largest step quantum a worker gets per controlled turn.
  std::size_t max_quantum = 8;
  /// insert/delete counts are drawn uniformly from [1, max_count].
  std::uint64_t max_count = 3;
};

/// Returns an empty string when valid, else what is wrong.
std::string validate(const StressConfig& cfg);

/// Per-process tallies for the run report.
struct WorkerTallies {
  std::uint64_t gets = 0;
  std::uint64_t inserts = 0;
  std::uint64_t deletes = 0;
  std::uint64_t deletes_true = 0;
  std::uint64_t attempts = 0;  // update-loop iterations over inserts and deletes
  std::uint64_t llx_fail = 0;
  std::uint64_t scx_calls = 0;
  std::uint64_t scx_success = 0;
  std::uint64_t freezing_cas_failures = 0;
  std::uint64_t update_cas_failures = 0;

  std::uint64_t ops() const { return gets + inserts + deletes; }
  std::uint64_t retries() const { return attempts - (inserts + deletes); }
  WorkerTallies& operator+=(const WorkerTallies& o);
};

/// One worker's view of a multiset under test.
class StressWorker {
 public:
  virtual ~StressWorker() = default;
  virtual std::uint64_t get(std::int64_t key) = 0;
  virtual void insert(std::int64_t key, std::uint64_t count) = 0;
  virtual bool remove(std::int64_t key, std::uint64_t count) = 0;
  /// Structure-level counters; the op counts are filled in by run_stress.
  virtual WorkerTallies tallies() const = 0;
};

class StressTarget {
 public:
  virtual ~StressTarget() = default;
  /// Called once per worker before any worker starts.
  virtual std::unique_ptr<StressWorker> make_worker(std::size_t index) = 0;
};

/// The LLX/SCX list with its own Domain; worker i uses process i + 1
/// (process 0 created the sentinels).
class ListTarget : public StressTarget {
 public:
  ListTarget();
  std::unique_ptr<StressWorker> make_worker(std::size_t index) override;
  Domain& domain() { return domain_; }
  multiset::MultisetList& list() { return *list_; }

 private:
  Domain domain_;
  std::unique_ptr<multiset::MultisetList> list_;
};

class LockedTarget : public StressTarget {
 public:
  std::unique_ptr<StressWorker> make_worker(std::size_t index) override;
  multiset::LockedMultiset& set() { return set_; }

 private:
  multiset::LockedMultiset set_;
};

struct StressResult {
  History history;
  std::vector<WorkerTallies> per_process;
  double wall_seconds = 0;

  WorkerTallies totals() const;
};

/// Launches cfg.processes workers, each performing cfg.ops_per_process
/// random operations (keys uniform in [0, key_range)). Worker i draws from
/// its own generator seeded from (seed, i). Under cfg.controlled the
/// interleaving is also drawn from seed, making the whole run reproducible.
/// A worker exception aborts the run and is rethrown.
StressResult run_stress(const StressConfig& cfg, StressTarget& target);

}  // namespace llxscx::harness
