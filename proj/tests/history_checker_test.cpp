#include <gtest/gtest.h>

#include <limits>
#include <random>
#include <sstream>

#include "llxscx/harness/checker.hpp"
#include "llxscx/harness/history.hpp"
#include "llxscx/harness/sequential_multiset.hpp"
#include "support/brute_force.hpp"

using namespace llxscx::harness;

namespace {

// Appends events with consecutive seq numbers.
class Builder {
 public:
  Builder& invoke(std::uint32_t p, OpKind op, std::int64_t key, std::optional<std::uint64_t> c = {}) {
    h_.push_back({h_.size(), p, op, key, c, EventType::kInvoke, std::nullopt});
    return *this;
  }
  Builder& respond(std::uint32_t p, OpKind op, std::int64_t key, std::optional<std::uint64_t> c,
                   std::optional<std::uint64_t> v) {
    h_.push_back({h_.size(), p, op, key, c, EventType::kRespond, v});
    return *this;
  }
  Builder& insert(std::uint32_t p, std::int64_t key, std::uint64_t c) {
    return invoke(p, OpKind::kInsert, key, c).respond(p, OpKind::kInsert, key, c, std::nullopt);
  }
  Builder& get(std::uint32_t p, std::int64_t key, std::uint64_t v) {
    return invoke(p, OpKind::kGet, key).respond(p, OpKind::kGet, key, std::nullopt, v);
  }
  Builder& del(std::uint32_t p, std::int64_t key, std::uint64_t c, bool ok) {
    return invoke(p, OpKind::kDelete, key, c).respond(p, OpKind::kDelete, key, c, ok ? 1 : 0);
  }
  const History& history() const { return h_; }

 private:
  History h_;
};

Verdict verdict(const History& h) { return check_linearizable(h).verdict; }

// Random concurrent execution against the sequential multiset: each op
// takes effect at a random point between its invoke and respond. With
// `perturb`, one response is altered afterwards.
History random_history(std::mt19937_64& rng, std::size_t processes, std::size_t ops, bool perturb) {
  struct Open {
    bool active = false;
    bool applied = false;
    OpKind op{};
    std::int64_t key = 0;
    std::optional<std::uint64_t> count;
    std::optional<std::uint64_t> resp;
  };
  SequentialMultiset state;
  std::vector<Open> open(processes);
  History h;
  std::size_t started = 0;
  const std::size_t budget = ops * 3 + 10;
  for (std::size_t step = 0; step < budget; ++step) {
    auto& o = open[rng() % processes];
    auto p = static_cast<std::uint32_t>(&o - open.data());
    if (!o.active) {
      if (started == ops) continue;
      ++started;
      o = Open{};
      o.active = true;
      o.op = static_cast<OpKind>(rng() % 3);
      o.key = static_cast<std::int64_t>(rng() % 2);
      if (o.op != OpKind::kGet) o.count = 1 + rng() % 2;
      h.push_back({h.size(), p, o.op, o.key, o.count, EventType::kInvoke, std::nullopt});
    } else if (!o.applied) {
      o.resp = state.apply(o.op, o.key, o.count.value_or(0));
      o.applied = true;
    } else {
      h.push_back({h.size(), p, o.op, o.key, o.count, EventType::kRespond, o.resp});
      o.active = false;
    }
  }
  if (perturb) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (h[i].kind == EventType::kRespond && h[i].op != OpKind::kInsert) candidates.push_back(i);
    }
    if (!candidates.empty()) {
      auto& e = h[candidates[rng() % candidates.size()]];
      e.value = e.op == OpKind::kDelete ? 1 - *e.value : *e.value + 1 + rng() % 2;
    }
  }
  return h;
}

}  // namespace

TEST(SequentialOracle, Examples) {
  SequentialMultiset s;
  auto [s1, r1] = oracle_apply(s, OpKind::kInsert, 5, 2);
  EXPECT_FALSE(r1.has_value());
  EXPECT_EQ(s1.count(5), 2u);
  auto [s2, r2] = oracle_apply(s1, OpKind::kDelete, 5, 3);
  EXPECT_EQ(r2, 0u);
  EXPECT_EQ(s2, s1);
  auto [s3, r3] = oracle_apply(s1, OpKind::kDelete, 5, 2);
  EXPECT_EQ(r3, 1u);
  EXPECT_TRUE(s3.contents().empty());
  auto [s4, r4] = oracle_apply(s1, OpKind::kGet, 5);
  EXPECT_EQ(r4, 2u);
  EXPECT_EQ(s4, s1);
  EXPECT_EQ(oracle_apply(s, OpKind::kGet, 9).second, 0u);
}

TEST(SequentialOracle, InsertSaturates) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  EXPECT_EQ(apply_to_count(kMax - 1, OpKind::kInsert, 5).count, kMax);
  EXPECT_EQ(apply_to_count(kMax, OpKind::kInsert, 1).count, kMax);
}

TEST(HistoryFormat, ExactLines) {
  EXPECT_EQ(to_json_line({0, 1, OpKind::kInsert, 5, 2, EventType::kInvoke, std::nullopt}),
            R"({"seq":0,"process":1,"op":"insert","key":5,"count":2,"kind":"invoke"})");
  EXPECT_EQ(to_json_line({1, 1, OpKind::kInsert, 5, 2, EventType::kRespond, std::nullopt}),
            R"({"seq":1,"process":1,"op":"insert","key":5,"count":2,"kind":"respond","value":null})");
  EXPECT_EQ(to_json_line({2, 0, OpKind::kGet, -4, std::nullopt, EventType::kRespond, 7}),
            R"({"seq":2,"process":0,"op":"get","key":-4,"kind":"respond","value":7})");
  EXPECT_EQ(to_json_line({3, 0, OpKind::kDelete, 5, 1, EventType::kRespond, 1}),
            R"({"seq":3,"process":0,"op":"delete","key":5,"count":1,"kind":"respond","value":true})");
}

TEST(HistoryFormat, RoundTrip) {
  std::mt19937_64 rng(3);
  const History h = random_history(rng, 3, 20, false);
  std::stringstream ss;
  write_history(ss, h);
  EXPECT_EQ(read_history(ss), h);
}

TEST(HistoryFormat, RejectsMalformedLines) {
  for (const char* bad : {
           "not json",
           "[]",
           R"({"seq":0,"process":0,"op":"put","key":1,"kind":"invoke"})",
           R"({"seq":0,"process":0,"op":"get","key":1,"kind":"call"})",
           R"({"seq":0,"process":0,"op":"get","kind":"invoke"})",
           R"({"seq":0,"process":0,"op":"get","key":1,"kind":"respond","value":true})",
           R"({"seq":0,"process":0,"op":"delete","key":1,"count":1,"kind":"respond","value":1})",
           R"({"seq":0,"process":0,"op":"insert","key":1,"count":1,"kind":"respond","value":0})",
           R"({"seq":0,"process":0,"op":"get","key":1,"kind":"invoke","value":3})",
       }) {
    EXPECT_THROW(parse_history_line(bad), HistoryError) << bad;
  }
}

TEST(HistoryFormat, RejectsMalformedHistories) {
  auto expect_bad = [](std::string text) {
    std::istringstream in(text);
    EXPECT_THROW(read_history(in), HistoryError) << text;
  };
  // seq not increasing
  expect_bad(R"({"seq":1,"process":0,"op":"get","key":1,"kind":"invoke"}
{"seq":1,"process":0,"op":"get","key":1,"kind":"respond","value":0})");
  // respond without invoke
  expect_bad(R"({"seq":0,"process":0,"op":"get","key":1,"kind":"respond","value":0})");
  // two open ops on one process
  expect_bad(R"({"seq":0,"process":0,"op":"get","key":1,"kind":"invoke"}
{"seq":1,"process":0,"op":"get","key":2,"kind":"invoke"})");
  // respond that does not match the invoke
  expect_bad(R"({"seq":0,"process":0,"op":"get","key":1,"kind":"invoke"}
{"seq":1,"process":0,"op":"get","key":2,"kind":"respond","value":0})");
  // insert without a count
  expect_bad(R"({"seq":0,"process":0,"op":"insert","key":1,"kind":"invoke"})");
  // zero count
  expect_bad(R"({"seq":0,"process":0,"op":"delete","key":1,"count":0,"kind":"invoke"})");
}

TEST(Checker, SequentialHistory) {
  Builder b;
  b.insert(0, 5, 2).get(1, 5, 2);
  EXPECT_EQ(verdict(b.history()), Verdict::kLinearizable);
}

TEST(Checker, PhantomGetIsRejected) {
  Builder b;
  b.insert(0, 5, 2).get(1, 5, 1);
  const auto r = check_linearizable(b.history());
  EXPECT_EQ(r.verdict, Verdict::kNotLinearizable);
  EXPECT_EQ(r.failing_key, 5);
}

TEST(Checker, OverlappingInsertAndGetAllowBothValues) {
  for (std::uint64_t seen : {0u, 1u}) {
    Builder b;
    b.invoke(0, OpKind::kInsert, 5, 1)
        .invoke(1, OpKind::kGet, 5)
        .respond(1, OpKind::kGet, 5, std::nullopt, seen)
        .respond(0, OpKind::kInsert, 5, 1, std::nullopt);
    EXPECT_EQ(verdict(b.history()), Verdict::kLinearizable) << seen;
  }
  Builder b;
  b.invoke(0, OpKind::kInsert, 5, 1)
      .invoke(1, OpKind::kGet, 5)
      .respond(1, OpKind::kGet, 5, std::nullopt, 2)
      .respond(0, OpKind::kInsert, 5, 1, std::nullopt);
  EXPECT_EQ(verdict(b.history()), Verdict::kNotLinearizable);
}

TEST(Checker, DeleteResponsesMustMatch) {
  Builder ok;
  ok.insert(0, 1, 2).del(1, 1, 3, false).del(1, 1, 2, true).get(0, 1, 0);
  EXPECT_EQ(verdict(ok.history()), Verdict::kLinearizable);
  Builder bad;
  bad.insert(0, 1, 2).del(1, 1, 3, true);
  EXPECT_EQ(verdict(bad.history()), Verdict::kNotLinearizable);
}

TEST(Checker, PendingOpsMayTakeEffectOrNot) {
  Builder with_effect;
  with_effect.invoke(0, OpKind::kInsert, 5, 1).get(1, 5, 1);
  EXPECT_EQ(verdict(with_effect.history()), Verdict::kLinearizable);
  Builder without;
  without.invoke(0, OpKind::kInsert, 5, 1).get(1, 5, 0);
  EXPECT_EQ(verdict(without.history()), Verdict::kLinearizable);
  Builder impossible;
  impossible.invoke(0, OpKind::kInsert, 5, 1).get(1, 5, 2);
  EXPECT_EQ(verdict(impossible.history()), Verdict::kNotLinearizable);
}

TEST(Checker, RealTimeOrderIsRespected) {
  // The get starts after the delete responded, so it cannot see the old count.
  Builder b;
  b.insert(0, 3, 1).del(0, 3, 1, true).get(1, 3, 1);
  EXPECT_EQ(verdict(b.history()), Verdict::kNotLinearizable);
}

TEST(Checker, KeysAreIndependent) {
  Builder b;
  b.insert(0, 1, 1).insert(1, 2, 4).get(0, 2, 4).get(1, 1, 1).del(0, 2, 4, true).get(1, 2, 0);
  EXPECT_EQ(verdict(b.history()), Verdict::kLinearizable);
}

TEST(Checker, EmptyHistory) { EXPECT_EQ(verdict({}), Verdict::kLinearizable); }

TEST(Checker, BudgetExhaustionIsDistinct) {
  std::mt19937_64 rng(11);
  const History h = random_history(rng, 4, 40, false);
  const auto r = check_linearizable(h, CheckOptions{1});
  EXPECT_EQ(r.verdict, Verdict::kBudgetExhausted);
  EXPECT_EQ(check_linearizable(h).verdict, Verdict::kLinearizable);
}

TEST(Checker, MalformedHistoryThrows) {
  History h{{0, 0, OpKind::kGet, 1, std::nullopt, EventType::kRespond, 0}};
  EXPECT_THROW(check_linearizable(h), HistoryError);
}

// The memoized per-key checker agrees with exhaustive search.
TEST(Checker, AgreesWithBruteForce) {
  std::mt19937_64 rng(2024);
  std::size_t positives = 0;
  std::size_t negatives = 0;
  for (int trial = 0; trial < 600; ++trial) {
    const bool perturb = trial % 2 == 1;
    const History h = random_history(rng, 3, 1 + rng() % 7, perturb);
    const bool expected = llxscx::testing::brute_force_linearizable(h);
    (expected ? positives : negatives) += 1;
    ASSERT_EQ(verdict(h), expected ? Verdict::kLinearizable : Verdict::kNotLinearizable)
        << "trial " << trial;
  }
  EXPECT_GT(positives, 100u);
  EXPECT_GT(negatives, 100u);
}
