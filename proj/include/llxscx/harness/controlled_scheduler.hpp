#pragma once

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "llxscx/step_hooks.hpp"

namespace llxscx::harness {

class ScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kRunToEnd = std::numeric_limits<std::size_t>::max();

/// One scripted turn: let `worker` execute `steps` shared-memory steps.
struct Turn {
  std::size_t worker;
  std::size_t steps;
};

struct StepRecord {
  std::size_t worker;
  Step step;
  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

/// Runs worker bodies cooperatively so that exactly one executes at a time.
/// Each body runs on its own thread with a StepObserver installed; it
/// stops before its next shared step whenever its step budget is spent.
/// Given the same bodies and the same sequence of run() calls, the
/// interleaving is identical from run to run.
class ControlledScheduler {
 public:
  ControlledScheduler();
  /// Drives every unfinished worker to completion, then joins.
  ~ControlledScheduler();
  ControlledScheduler(const ControlledScheduler&) = delete;
  ControlledScheduler& operator=(const ControlledScheduler&) = delete;

  /// Registers a body. It does not start executing until first run().
  std::size_t add_worker(std::function<void()> body);

  /// Lets `worker` perform up to `steps` shared steps (kRunToEnd for all).
  /// Returns how many it performed. Throws ScheduleError if the worker has
  /// already completed, and rethrows any exception the body raised.
  std::size_t run(std::size_t worker, std::size_t steps);

  bool finished(std::size_t worker) const;
  bool all_finished() const;
  std::size_t worker_count() const { return workers_.size(); }

  /// Runs each unfinished worker to completion in index order.
  void run_remaining();

  const std::vector<StepRecord>& steps() const { return trace_; }

 private:
  struct Worker;
  class Observer;

  void worker_main(Worker& w);

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::unique_ptr<Worker>> workers_;
  std::vector<StepRecord> trace_;
};

/// Executes `script` turn by turn, then finishes any unfinished worker in
/// index order. A turn that names an already finished worker is a script
/// deadlock and throws ScheduleError.
std::vector<StepRecord> controlled_schedule(ControlledScheduler& sched,
                                            std::span<const Turn> script);

}  // namespace llxscx::harness
