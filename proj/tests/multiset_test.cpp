#include <gtest/gtest.h>

#include <limits>
#include <optional>
#include <random>
#include <set>

#include "llxscx/audit_log.hpp"
#include "llxscx/harness/auditor.hpp"
#include "llxscx/harness/checker.hpp"
#include "llxscx/harness/controlled_scheduler.hpp"
#include "llxscx/harness/sequential_multiset.hpp"
#include "llxscx/multiset/multiset_list.hpp"

using namespace llxscx;
using namespace llxscx::multiset;
using llxscx::harness::ControlledScheduler;
using llxscx::harness::kRunToEnd;

namespace {

class MultisetTest : public ::testing::Test {
 protected:
  Domain domain;
  Process& p = domain.register_process();
  MultisetList list{p};

  DataRecord* tail() const { return list.reachable_nodes().back(); }
  DataRecord* node_with(std::int64_t key) const {
    for (auto* n : list.reachable_nodes()) {
      if (node_key(n) == Key::client(key)) return n;
    }
    return nullptr;
  }
};

std::set<DataRecord*> as_set(const std::vector<DataRecord*>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(KeyOrder, SentinelsBoundClientKeys) {
  EXPECT_LT(Key::neg_inf(), Key::client(std::numeric_limits<std::int64_t>::min()));
  EXPECT_LT(Key::client(std::numeric_limits<std::int64_t>::max()), Key::pos_inf());
  EXPECT_LT(Key::client(-3), Key::client(2));
  EXPECT_EQ(Key::client(4), Key::client(4));
  EXPECT_NE(Key::client(4), Key::pos_inf());
}

TEST_F(MultisetTest, EmptySearchReturnsTailAndHead) {
  auto [r, prev] = list.search(p, 5);
  EXPECT_EQ(prev, list.head());
  EXPECT_EQ(node_key(r), Key::pos_inf());
  EXPECT_EQ(list.get(p, 5), 0u);
  EXPECT_EQ(list.check_sorted_chain(), "");
}

TEST_F(MultisetTest, SearchFindsBracketingNodes) {
  list.insert(p, 3, 1);
  list.insert(p, 7, 1);
  DataRecord* n3 = node_with(3);
  DataRecord* n7 = node_with(7);
  ASSERT_NE(n3, nullptr);
  ASSERT_NE(n7, nullptr);
  EXPECT_EQ(list.search(p, 7), std::make_pair(n7, n3));
  EXPECT_EQ(list.search(p, 5), std::make_pair(n7, n3));
  EXPECT_EQ(list.search(p, 3), std::make_pair(n3, list.head()));
  EXPECT_EQ(list.search(p, 9), std::make_pair(tail(), n7));
}

TEST_F(MultisetTest, InsertIntoEmpty) {
  list.insert(p, 5, 3);
  EXPECT_EQ(list.get(p, 5), 3u);
  const std::vector<MultisetList::Entry> expected{
      {Key::neg_inf(), 0}, {Key::client(5), 3}, {Key::pos_inf(), 0}};
  EXPECT_EQ(list.audit_structure(), expected);
}

TEST_F(MultisetTest, InsertExistingKeyBumpsCountInPlace) {
  list.insert(p, 5, 2);
  const auto before = list.reachable_nodes();
  list.insert(p, 5, 3);
  EXPECT_EQ(list.reachable_nodes(), before);
  EXPECT_EQ(list.get(p, 5), 5u);
}

TEST_F(MultisetTest, DeleteOnEmptyReturnsFalse) {
  EXPECT_FALSE(list.remove(p, 5, 1));
  EXPECT_EQ(list.audit_structure().size(), 2u);
}

TEST_F(MultisetTest, DeleteMoreThanPresentReturnsFalse) {
  list.insert(p, 5, 3);
  EXPECT_FALSE(list.remove(p, 5, 4));
  EXPECT_EQ(list.get(p, 5), 3u);
}

TEST_F(MultisetTest, FullDeleteFinalizesNodeAndSuccessor) {
  list.insert(p, 5, 3);
  DataRecord* r = node_with(5);
  DataRecord* old_tail = tail();
  EXPECT_TRUE(list.remove(p, 5, 3));
  EXPECT_EQ(list.get(p, 5), 0u);

  std::vector<DataRecord*> finalized;
  domain.for_each_record([&](DataRecord& rec) {
    if (rec.marked().load()) finalized.push_back(&rec);
  });
  EXPECT_EQ(as_set(finalized), (std::set<DataRecord*>{r, old_tail}));
  EXPECT_TRUE(llx(p, r).is_finalized());
  EXPECT_TRUE(llx(p, old_tail).is_finalized());
  EXPECT_NE(tail(), old_tail);
  EXPECT_EQ(list.check_sorted_chain(), "");
}

TEST_F(MultisetTest, PartialDeleteReplacesNode) {
  list.insert(p, 5, 3);
  DataRecord* r = node_with(5);
  EXPECT_TRUE(list.remove(p, 5, 2));
  EXPECT_EQ(list.get(p, 5), 1u);
  DataRecord* replacement = node_with(5);
  EXPECT_NE(replacement, r);
  EXPECT_TRUE(r->marked().load());
  EXPECT_TRUE(llx(p, r).is_finalized());
  EXPECT_FALSE(replacement->marked().load());
  EXPECT_EQ(replacement->field(kCountField).load(), 1u);
}

TEST_F(MultisetTest, InsertSaturatesWithWarning) {
  audit::Capture cap;
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  list.insert(p, 1, kMax - 1);
  list.insert(p, 1, 5);
  EXPECT_EQ(list.get(p, 1), kMax);
  list.insert(p, 1, 1);
  EXPECT_EQ(list.get(p, 1), kMax);
  std::size_t warnings = 0;
  for (const auto& e : cap.events()) warnings += e.kind == audit::EventKind::kWarning;
  EXPECT_EQ(warnings, 2u);
  const auto events = cap.events();
  EXPECT_TRUE(harness::audit_invariants(events).ok());
}

TEST_F(MultisetTest, NonPositiveCountsAreRejected) {
  EXPECT_THROW(list.insert(p, 1, 0), ContractViolation);
  EXPECT_THROW(list.remove(p, 1, 0), ContractViolation);
}

// Random single-process sequences: responses match the sequential multiset,
// the chain stays sorted, and each successful SCX removes exactly its R.
TEST_F(MultisetTest, RandomSequencesMatchOracleAndRemoveExactlyR) {
  std::mt19937_64 rng(42);
  harness::SequentialMultiset oracle;
  audit::Capture cap;
  for (int i = 0; i < 400; ++i) {
    const auto key = static_cast<std::int64_t>(rng() % 6);
    const std::uint64_t c = 1 + rng() % 3;
    const auto before = as_set(list.reachable_nodes());
    cap.take();
    switch (rng() % 3) {
      case 0:
        ASSERT_EQ(list.get(p, key), oracle.count(key));
        break;
      case 1:
        list.insert(p, key, c);
        oracle.apply(harness::OpKind::kInsert, key, c);
        break;
      default:
        ASSERT_EQ(list.remove(p, key, c), oracle.apply(harness::OpKind::kDelete, key, c) == 1u);
        break;
    }
    ASSERT_EQ(list.check_sorted_chain(), "");

    const auto after = as_set(list.reachable_nodes());
    std::set<std::uint64_t> removed;
    for (auto* n : before) {
      if (!after.contains(n)) removed.insert(n->id());
    }
    std::set<std::uint64_t> r_ids;
    const auto events = cap.take();
    std::optional<std::uint64_t> committed;
    for (const auto& e : events) {
      if (e.kind == audit::EventKind::kCommitStep) committed = e.descriptor;
    }
    for (const auto& e : events) {
      if (e.kind == audit::EventKind::kScxCreate && committed == e.descriptor) {
        r_ids.insert(e.r.begin(), e.r.end());
      }
    }
    ASSERT_EQ(removed, r_ids) << "op " << i;
  }
  for (std::int64_t k = 0; k < 6; ++k) EXPECT_EQ(list.get(p, k), oracle.count(k));
}

// Two concurrent insert(5,1) at every alignment: the final count is 2.
TEST(MultisetConcurrency, ConcurrentInsertsAccumulate) {
  for (std::size_t preset : {0, 1}) {
    for (std::size_t cut = 0; cut < 40; ++cut) {
      Domain d;
      Process& setup = d.register_process();
      Process& a = d.register_process();
      Process& b = d.register_process();
      MultisetList list(setup);
      if (preset) list.insert(setup, 5, 1);
      ControlledScheduler sched;
      sched.add_worker([&] { list.insert(a, 5, 1); });
      sched.add_worker([&] { list.insert(b, 5, 1); });
      sched.run(0, cut);
      sched.run(1, kRunToEnd);
      sched.run_remaining();
      EXPECT_EQ(list.get(setup, 5), 2u + preset) << "cut " << cut;
      EXPECT_EQ(list.check_sorted_chain(), "");
    }
  }
}

// A get racing a full delete returns 0 or the old count, consistent with
// some linearization of the two operations.
TEST(MultisetConcurrency, GetRacingDeleteIsLinearizable) {
  for (std::size_t cut = 0; cut < 40; ++cut) {
    Domain d;
    Process& setup = d.register_process();
    Process& a = d.register_process();
    Process& b = d.register_process();
    MultisetList list(setup);
    list.insert(setup, 5, 2);
    harness::HistoryRecorder rec;
    rec.invoke(9, harness::OpKind::kInsert, 5, 2);
    rec.respond(9, harness::OpKind::kInsert, 5, 2, std::nullopt);

    ControlledScheduler sched;
    std::uint64_t seen = 99;
    sched.add_worker([&] {
      rec.invoke(0, harness::OpKind::kDelete, 5, 2);
      const bool ok = list.remove(a, 5, 2);
      rec.respond(0, harness::OpKind::kDelete, 5, 2, ok ? 1 : 0);
    });
    sched.add_worker([&] {
      rec.invoke(1, harness::OpKind::kGet, 5, std::nullopt);
      seen = list.get(b, 5);
      rec.respond(1, harness::OpKind::kGet, 5, std::nullopt, seen);
    });
    sched.run(0, cut);
    sched.run(1, kRunToEnd);
    sched.run_remaining();
    EXPECT_TRUE(seen == 0 || seen == 2) << "cut " << cut;
    EXPECT_EQ(harness::check_linearizable(rec.take()).verdict, harness::Verdict::kLinearizable)
        << "cut " << cut;
  }
}
