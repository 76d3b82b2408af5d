#include "llxscx/harness/stress.hpp"

#include <barrier>
#include <chrono>
#include <exception>
#include <random>
#include <thread>

#include "llxscx/harness/controlled_scheduler.hpp"

namespace llxscx::harness {
namespace {

class ListWorker : public StressWorker {
 public:
  ListWorker(multiset::MultisetList& list, Process& proc) : list_(list), proc_(proc) {}

  std::uint64_t get(std::int64_t key) override { return list_.get(proc_, key); }
  void insert(std::int64_t key, std::uint64_t count) override {
    multiset::OpStats st;
    list_.insert(proc_, key, count, &st);
    attempts_ += st.attempts;
  }
  bool remove(std::int64_t key, std::uint64_t count) override {
    multiset::OpStats st;
    const bool ok = list_.remove(proc_, key, count, &st);
    attempts_ += st.attempts;
    return ok;
  }
  WorkerTallies tallies() const override {
    const auto& t = proc_.totals();
    WorkerTallies out;
    out.attempts = attempts_;
    out.llx_fail = t.llx_fail;
    out.scx_calls = t.scx_calls;
    out.scx_success = t.scx_success;
    out.freezing_cas_failures = t.freezing_cas_failures;
    out.update_cas_failures = t.update_cas_failures;
    return out;
  }

 private:
  multiset::MultisetList& list_;
  Process& proc_;
  std::uint64_t attempts_ = 0;
};

class LockedWorker : public StressWorker {
 public:
  explicit LockedWorker(multiset::LockedMultiset& set) : set_(set) {}
  std::uint64_t get(std::int64_t key) override { return set_.get(key); }
  void insert(std::int64_t key, std::uint64_t count) override {
    ++attempts_;
    set_.insert(key, count);
  }
  bool remove(std::int64_t key, std::uint64_t count) override {
    ++attempts_;
    return set_.remove(key, count);
  }
  WorkerTallies tallies() const override {
    WorkerTallies t;
    t.attempts = attempts_;
    return t;
  }

 private:
  multiset::LockedMultiset& set_;
  std::uint64_t attempts_ = 0;
};

// Body of worker `index`: performs its ops and fills `tallies`.
void worker_loop(const StressConfig& cfg, std::size_t index, StressWorker& worker,
                 HistoryRecorder& rec, WorkerTallies& tallies) {
  std::mt19937_64 rng(cfg.seed * 0x9e3779b97f4a7c15ULL + index + 1);
  std::uniform_int_distribution<std::uint64_t> key_dist(0, cfg.key_range - 1);
  std::uniform_int_distribution<std::uint64_t> count_dist(1, cfg.max_count);
  std::uniform_int_distribution<unsigned> mix_dist(0, 99);
  const auto proc = static_cast<std::uint32_t>(index);

  for (std::size_t i = 0; i < cfg.ops_per_process; ++i) {
    const auto key = static_cast<std::int64_t>(key_dist(rng));
    const unsigned roll = mix_dist(rng);
    if (roll < cfg.mix.get) {
      rec.invoke(proc, OpKind::kGet, key, std::nullopt);
      const auto v = worker.get(key);
      rec.respond(proc, OpKind::kGet, key, std::nullopt, v);
      ++tallies.gets;
    } else if (roll < cfg.mix.get + cfg.mix.insert) {
      const auto c = count_dist(rng);
      rec.invoke(proc, OpKind::kInsert, key, c);
      worker.insert(key, c);
      rec.respond(proc, OpKind::kInsert, key, c, std::nullopt);
      ++tallies.inserts;
    } else {
      const auto c = count_dist(rng);
      rec.invoke(proc, OpKind::kDelete, key, c);
      const bool ok = worker.remove(key, c);
      rec.respond(proc, OpKind::kDelete, key, c, ok ? 1 : 0);
      ++tallies.deletes;
      if (ok) ++tallies.deletes_true;
    }
  }
}

}  // namespace

std::string validate(const StressConfig& cfg) {
  if (cfg.processes == 0) return "processes must be at least 1";
  if (cfg.key_range == 0) return "key range must be at least 1";
  if (cfg.mix.get + cfg.mix.insert + cfg.mix.del != 100) return "mix must sum to 100";
  if (cfg.max_count == 0) return "max count must be at least 1";
  if (cfg.controlled && cfg.max_quantum == 0) return "max quantum must be at least 1";
  return {};
}

WorkerTallies& WorkerTallies::operator+=(const WorkerTallies& o) {
  gets += o.gets;
  inserts += o.inserts;
  deletes += o.deletes;
  deletes_true += o.deletes_true;
  attempts += o.attempts;
  llx_fail += o.llx_fail;
  scx_calls += o.scx_calls;
  scx_success += o.scx_success;
  freezing_cas_failures += o.freezing_cas_failures;
  update_cas_failures += o.update_cas_failures;
  return *this;
}

WorkerTallies StressResult::totals() const {
  WorkerTallies t;
  for (const auto& p : per_process) t += p;
  return t;
}

ListTarget::ListTarget() : list_(std::make_unique<multiset::MultisetList>(domain_.register_process())) {}

std::unique_ptr<StressWorker> ListTarget::make_worker(std::size_t) {
  return std::make_unique<ListWorker>(*list_, domain_.register_process());
}

std::unique_ptr<StressWorker> LockedTarget::make_worker(std::size_t) {
  return std::make_unique<LockedWorker>(set_);
}

StressResult run_stress(const StressConfig& cfg, StressTarget& target) {
  if (auto err = validate(cfg); !err.empty()) throw std::invalid_argument(err);

  std::vector<std::unique_ptr<StressWorker>> workers;
  for (std::size_t i = 0; i < cfg.processes; ++i) workers.push_back(target.make_worker(i));

  HistoryRecorder rec(cfg.record_history);
  StressResult result;
  result.per_process.resize(cfg.processes);

  const auto start = std::chrono::steady_clock::now();
  if (cfg.controlled) {
    ControlledScheduler sched;
    for (std::size_t i = 0; i < cfg.processes; ++i) {
      sched.add_worker([&, i] { worker_loop(cfg, i, *workers[i], rec, result.per_process[i]); });
    }
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<std::size_t> quantum(1, cfg.max_quantum);
    std::vector<std::size_t> live(cfg.processes);
    for (std::size_t i = 0; i < live.size(); ++i) live[i] = i;
    while (!live.empty()) {
      const std::size_t pick = std::uniform_int_distribution<std::size_t>(0, live.size() - 1)(rng);
      const std::size_t w = live[pick];
      sched.run(w, quantum(rng));
      if (sched.finished(w)) live.erase(live.begin() + static_cast<std::ptrdiff_t>(pick));
    }
  } else {
    std::barrier sync(static_cast<std::ptrdiff_t>(cfg.processes));
    std::vector<std::exception_ptr> errors(cfg.processes);
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < cfg.processes; ++i) {
      threads.emplace_back([&, i] {
        sync.arrive_and_wait();
        try {
          worker_loop(cfg, i, *workers[i], rec, result.per_process[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  for (std::size_t i = 0; i < cfg.processes; ++i) {
    WorkerTallies structural = workers[i]->tallies();
    auto& t = result.per_process[i];
    structural.gets = t.gets;
    structural.inserts = t.inserts;
    structural.deletes = t.deletes;
    structural.deletes_true = t.deletes_true;
    t = structural;
  }
  result.history = rec.take();
  return result;
}

}  // namespace llxscx::harness
