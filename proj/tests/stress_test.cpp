#include <gtest/gtest.h>

#include "llxscx/audit_log.hpp"
#include "llxscx/harness/auditor.hpp"
#include "llxscx/harness/checker.hpp"
#include "llxscx/harness/stress.hpp"

using namespace llxscx;
using namespace llxscx::harness;

TEST(Stress, OneProcessTenOps) {
  StressConfig cfg;
  cfg.processes = 1;
  cfg.ops_per_process = 10;
  ListTarget target;
  const auto r = run_stress(cfg, target);
  ASSERT_EQ(r.history.size(), 20u);
  for (std::size_t i = 0; i < r.history.size(); ++i) {
    EXPECT_EQ(r.history[i].seq, i);
    EXPECT_EQ(r.history[i].kind, i % 2 == 0 ? EventType::kInvoke : EventType::kRespond);
  }
  EXPECT_EQ(r.totals().ops(), 10u);
  EXPECT_EQ(check_linearizable(r.history).verdict, Verdict::kLinearizable);
}

TEST(Stress, FourThreadsAreCompleteAndLinearizable) {
  StressConfig cfg;
  ListTarget target;
  const auto r = run_stress(cfg, target);
  ASSERT_EQ(r.history.size(), 8000u);
  const auto ops = to_operations(r.history);
  EXPECT_EQ(ops.size(), 4000u);
  for (const auto& op : ops) EXPECT_FALSE(op.pending());
  ASSERT_EQ(r.per_process.size(), 4u);
  for (const auto& t : r.per_process) EXPECT_EQ(t.ops(), 1000u);
  EXPECT_EQ(check_linearizable(r.history).verdict, Verdict::kLinearizable);
  EXPECT_EQ(target.list().check_sorted_chain(), "");
}

TEST(Stress, HistoryCanBeDisabled) {
  StressConfig cfg;
  cfg.processes = 2;
  cfg.ops_per_process = 50;
  cfg.record_history = false;
  ListTarget target;
  const auto r = run_stress(cfg, target);
  EXPECT_TRUE(r.history.empty());
  EXPECT_EQ(r.totals().ops(), 100u);
}

TEST(Stress, LockedBaselineIsLinearizable) {
  StressConfig cfg;
  cfg.ops_per_process = 500;
  LockedTarget target;
  const auto r = run_stress(cfg, target);
  EXPECT_EQ(check_linearizable(r.history).verdict, Verdict::kLinearizable);
}

TEST(Stress, ControlledRunsAreReproducible) {
  StressConfig cfg;
  cfg.processes = 3;
  cfg.ops_per_process = 200;
  cfg.key_range = 3;
  cfg.controlled = true;
  cfg.seed = 7;

  auto once = [&] {
    audit::Capture cap;
    ListTarget target;
    auto r = run_stress(cfg, target);
    EXPECT_EQ(target.list().check_sorted_chain(), "");
    return std::make_pair(std::move(r.history), cap.take());
  };
  const auto [h1, t1] = once();
  const auto [h2, t2] = once();
  EXPECT_EQ(h1, h2);
  EXPECT_EQ(t1, t2);
  EXPECT_EQ(check_linearizable(h1).verdict, Verdict::kLinearizable);
  const auto report = audit_invariants(t1);
  EXPECT_TRUE(report.ok()) << report.summary();

  cfg.seed = 8;
  ListTarget other;
  EXPECT_NE(run_stress(cfg, other).history, h1);
}

TEST(Stress, ControlledRunsShowContention) {
  StressConfig cfg;
  cfg.processes = 4;
  cfg.ops_per_process = 300;
  cfg.key_range = 2;
  cfg.controlled = true;
  cfg.max_quantum = 3;
  ListTarget target;
  const auto t = run_stress(cfg, target).totals();
  EXPECT_GT(t.retries(), 0u);
  EXPECT_GT(t.scx_calls, t.scx_success);
}

TEST(Stress, InvalidConfigIsRejected) {
  ListTarget target;
  StressConfig cfg;
  cfg.mix = {50, 50, 50};
  EXPECT_FALSE(validate(cfg).empty());
  EXPECT_THROW(run_stress(cfg, target), std::invalid_argument);
  cfg = {};
  cfg.key_range = 0;
  EXPECT_FALSE(validate(cfg).empty());
  cfg = {};
  cfg.processes = 0;
  EXPECT_FALSE(validate(cfg).empty());
  EXPECT_TRUE(validate(StressConfig{}).empty());
}
