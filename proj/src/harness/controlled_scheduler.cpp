#include "llxscx/harness/controlled_scheduler.hpp"

#include <string>

namespace llxscx::harness {

class ControlledScheduler::Observer : public StepObserver {
 public:
  Observer(ControlledScheduler& sched, Worker& worker) : sched_(sched), worker_(worker) {}
  void before_step(Step step) override;

 private:
  ControlledScheduler& sched_;
  Worker& worker_;
};

struct ControlledScheduler::Worker {
  std::size_t index = 0;
  std::function<void()> body;
  std::thread thread;
  std::size_t budget = 0;
  std::size_t executed = 0;
  bool has_turn = false;
  bool started = false;
  bool done = false;
  std::exception_ptr error;
};

void ControlledScheduler::Observer::before_step(Step step) {
  std::unique_lock lk(sched_.mu_);
  while (worker_.budget == 0) {
    worker_.has_turn = false;
    sched_.cv_.notify_all();
    sched_.cv_.wait(lk, [&] { return worker_.has_turn; });
  }
  if (worker_.budget != kRunToEnd) --worker_.budget;
  ++worker_.executed;
  sched_.trace_.push_back({worker_.index, step});
}

ControlledScheduler::ControlledScheduler() = default;

ControlledScheduler::~ControlledScheduler() {
  for (auto& w : workers_) {
    if (!w->done) {
      try {
        run(w->index, kRunToEnd);
      } catch (...) {
      }
    }
  }
  for (auto& w : workers_) {
    if (w->thread.joinable()) w->thread.join();
  }
}

std::size_t ControlledScheduler::add_worker(std::function<void()> body) {
  auto w = std::make_unique<Worker>();
  w->index = workers_.size();
  w->body = std::move(body);
  workers_.push_back(std::move(w));
  return workers_.size() - 1;
}

void ControlledScheduler::worker_main(Worker& w) {
  Observer observer(*this, w);
  set_thread_step_observer(&observer);
  {
    std::unique_lock lk(mu_);
    cv_.wait(lk, [&] { return w.has_turn; });
  }
  try {
    w.body();
  } catch (...) {
    w.error = std::current_exception();
  }
  set_thread_step_observer(nullptr);
  std::lock_guard lk(mu_);
  w.done = true;
  w.has_turn = false;
  cv_.notify_all();
}

std::size_t ControlledScheduler::run(std::size_t worker, std::size_t steps) {
  if (worker >= workers_.size()) {
    throw ScheduleError("no worker " + std::to_string(worker));
  }
  Worker& w = *workers_[worker];
  std::unique_lock lk(mu_);
  if (w.done) {
    throw ScheduleError("worker " + std::to_string(worker) + " scheduled past completion");
  }
  const std::size_t before = w.executed;
  w.budget = steps;
  w.has_turn = true;
  if (!w.started) {
    w.started = true;
    lk.unlock();
    w.thread = std::thread([this, &w] { worker_main(w); });
    lk.lock();
  }
  cv_.notify_all();
  cv_.wait(lk, [&] { return !w.has_turn; });
  w.budget = 0;
  const std::size_t performed = w.executed - before;
  if (w.error) {
    auto err = std::exchange(w.error, nullptr);
    std::rethrow_exception(err);
  }
  return performed;
}

bool ControlledScheduler::finished(std::size_t worker) const {
  std::lock_guard lk(mu_);
  return workers_.at(worker)->done;
}

bool ControlledScheduler::all_finished() const {
  std::lock_guard lk(mu_);
  for (const auto& w : workers_) {
    if (!w->done) return false;
  }
  return true;
}

void ControlledScheduler::run_remaining() {
  for (std::size_t i = 0; i < workers_.size(); ++i) {
    if (!finished(i)) run(i, kRunToEnd);
  }
}

std::vector<StepRecord> controlled_schedule(ControlledScheduler& sched,
                                            std::span<const Turn> script) {
  for (const auto& turn : script) sched.run(turn.worker, turn.steps);
  sched.run_remaining();
  return sched.steps();
}

}  // namespace llxscx::harness
