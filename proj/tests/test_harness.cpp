#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "fsnap/harness.hpp"

using namespace fsnap;

namespace {

// Number of interleavings of independent step sequences.
std::uint64_t multinomial(const std::vector<std::uint64_t>& parts) {
  std::uint64_t total = 0, result = 1;
  for (auto p : parts) {
    for (std::uint64_t k = 1; k <= p; ++k) {
      ++total;
      result = result * total / k;
    }
  }
  return result;
}

std::vector<std::uint64_t> step_counts(const Programs& programs) {
  std::vector<std::uint64_t> out;
  for (const auto& p : programs) out.push_back(total_steps(Programs{p}));
  return out;
}

Programs shapes(std::initializer_list<const char*> texts) {
  std::vector<std::vector<OpKind>> s;
  for (auto t : texts) s.push_back(parse_program_shape(t));
  return make_programs(std::move(s));
}

}  // namespace

TEST(Programs, FreshValuesAndIds) {
  const auto p = alternating_programs(3, 4);
  std::set<Value> vals;
  std::set<std::uint64_t> ids;
  for (const auto& prog : p)
    for (const auto& op : prog.ops) {
      ids.insert(op.hl_op);
      if (op.kind == OpKind::update) {
        EXPECT_EQ(op.arg % 3, prog.pid);
        EXPECT_TRUE(vals.insert(op.arg).second);
      }
    }
  EXPECT_EQ(ids.size(), 12u);
  EXPECT_EQ(fresh_value(1, 3, 1), 4u);
  EXPECT_THROW(parse_program_shape("u x"), UsageError);
}

TEST(Explore, TwoByUpdateFscan) {
  const auto f = make_function("sum-mod:10", 2);
  const SimConfig cfg{2, &f, 0};
  const auto programs = alternating_programs(2, 2);
  const auto r = explore(cfg, programs, ExploreBudget{});
  EXPECT_EQ(r.schedules, 12870u);
  EXPECT_EQ(r.schedules, multinomial({8, 8}));
  EXPECT_EQ(r.total_steps, 16u);
  EXPECT_EQ(r.duplicate_schedules, 0u);
  EXPECT_EQ(r.failed_schedules, 0u);
  EXPECT_TRUE(r.ok());
}

TEST(Explore, ScheduleCountsMatchMultinomial) {
  const auto f = make_function("sum-mod:10", 3);
  for (auto programs : {shapes({"u", "f", ""}), shapes({"u f", "f", ""}),
                        shapes({"u", "f", "f"}), shapes({"f f", "f f", "f"}),
                        shapes({"u", "u", ""})}) {
    const SimConfig cfg{3, &f, 0};
    const auto r = explore(cfg, programs, ExploreBudget{});
    EXPECT_EQ(r.schedules, multinomial(step_counts(programs)));
    EXPECT_TRUE(r.ok());
  }
}

TEST(Explore, UpdateAgainstFscanSeesOldOrNew) {
  const auto f = make_function("sum-mod:10", 2);
  const SimConfig cfg{2, &f, 0};
  const auto programs = shapes({"u", "f"});
  const auto r = explore(cfg, programs, ExploreBudget{});
  EXPECT_EQ(r.schedules, 8u);
  EXPECT_TRUE(r.ok());

  std::set<Answer> seen;
  DfsCursor cursor;
  do {
    const auto run = run_simulated(cfg, programs, cursor);
    for (const auto& e : run.history.events)
      if (e.kind == EventKind::respond && e.op == OpKind::fscan) seen.insert(*e.ret);
  } while (cursor.advance());
  const Value written = programs[0].ops[0].arg;
  EXPECT_EQ(seen, (std::set<Answer>{Answer{std::uint64_t{0}}, Answer{written % 10}}));
}

TEST(Explore, SingleProcessHasOneSchedule) {
  const auto f = make_function("sum-mod:10", 1);
  const SimConfig cfg{1, &f, 0};
  const auto r = explore(cfg, alternating_programs(1, 2), ExploreBudget{});
  EXPECT_EQ(r.schedules, 1u);
  EXPECT_TRUE(r.ok());
}

TEST(Explore, Budgets) {
  const auto f = make_function("sum-mod:10", 2);
  const SimConfig cfg{2, &f, 0};
  EXPECT_THROW(explore(cfg, alternating_programs(2, 3), ExploreBudget{}), BudgetExceeded);
  const auto r = explore(cfg, alternating_programs(2, 2), ExploreBudget{18, 100});
  EXPECT_TRUE(r.budget_exceeded);
  EXPECT_EQ(r.schedules, 100u);
  EXPECT_FALSE(r.ok());
}

TEST(Explore, MutationsAreCaughtExhaustively) {
  const auto f = make_function("sum-mod:10", 2);
  SimConfig cfg{2, &f, 0, Mutation::constant_next};
  EXPECT_GT(explore(cfg, alternating_programs(2, 2), ExploreBudget{}).failed_schedules, 0u);
}

TEST(Fuzz, Deterministic) {
  const auto f = make_function("sum-mod:5", 4);
  FuzzConfig fc;
  fc.n = 4;
  fc.f = &f;
  fc.schedules = 300;
  fc.seed = 42;
  const auto a = fuzz(fc);
  fc.workers = 3;
  const auto b = fuzz(fc);
  EXPECT_TRUE(a.ok());
  EXPECT_EQ(a.runs, 300u);
  EXPECT_EQ(a.run_seeds, b.run_seeds);
  EXPECT_EQ(a.counts, b.counts);
}

TEST(Fuzz, NativeBackendPasses) {
  const auto f = make_function("sum-mod:5", 4);
  FuzzConfig fc;
  fc.n = 4;
  fc.f = &f;
  fc.schedules = 50;
  fc.backend = Backend::native;
  EXPECT_TRUE(fuzz(fc).ok());
}

TEST(Fuzz, MutationsDetected) {
  const auto f = make_function("sum-mod:5", 4);
  for (auto m : {Mutation::skip_null_clear, Mutation::constant_next}) {
    FuzzConfig fc;
    fc.n = 4;
    fc.f = &f;
    fc.schedules = 2000;
    fc.seed = 42;
    fc.mutation = m;
    const auto r = fuzz(fc);
    EXPECT_FALSE(r.ok()) << to_string(m);
    ASSERT_FALSE(r.failures.empty());
    EXPECT_TRUE(r.failures.front().seed.has_value());
    EXPECT_FALSE(r.failures.front().trace.empty());
  }
}

TEST(Replay, ReproducesPassingRun) {
  const auto f = make_function("max-pid", 3);
  const auto programs = fuzz_programs(3, 4, 7);
  RandomSchedule sched(7);
  const auto run = run_simulated(SimConfig{3, &f, 0}, programs, sched);
  const TraceMeta meta{3, "max-pid", 0, Mutation::none, programs};
  const auto r = replay(meta, run.trace);
  EXPECT_TRUE(r.reproduced) << r.divergence;
  EXPECT_TRUE(r.ok());
}

TEST(Replay, FailingTraceStaysFailing) {
  const auto f = make_function("sum-mod:5", 4);
  FuzzConfig fc;
  fc.n = 4;
  fc.f = &f;
  fc.schedules = 100;
  fc.seed = 1;
  fc.mutation = Mutation::constant_next;
  const auto fr = fuzz(fc);
  ASSERT_FALSE(fr.failures.empty());
  const auto& failure = fr.failures.front();
  const TraceMeta meta{4, "sum-mod:5", 0, Mutation::constant_next, failure.programs};
  const auto r = replay(meta, failure.trace);
  EXPECT_TRUE(r.reproduced) << r.divergence;
  EXPECT_FALSE(r.ok());
  // Same findings as the original run.
  RandomSchedule sched(*failure.seed);
  const SimConfig cfg{4, &f, 0, Mutation::constant_next};
  const auto original =
      evaluate(cfg, failure.programs, run_simulated(cfg, failure.programs, sched));
  EXPECT_EQ(r.recorded.finding_count, original.finding_count);
}

TEST(Replay, TamperedTraceDiverges) {
  const auto f = make_function("sum-mod:5", 2);
  const auto programs = alternating_programs(2, 2);
  RandomSchedule sched(3);
  auto trace = run_simulated(SimConfig{2, &f, 0}, programs, sched).trace;
  std::get<VEntry>(trace.front().value).val += 1;
  const TraceMeta meta{2, "sum-mod:5", 0, Mutation::none, programs};
  const auto r = replay(meta, trace);
  EXPECT_FALSE(r.reproduced);
  EXPECT_FALSE(r.ok());
}

TEST(OracleDiff, SequentialRunsMatch) {
  const auto f = make_function("sum-mod:7", 3);
  const auto r = oracle_diff(3, f, 0, 4, 200, 9);
  EXPECT_EQ(r.schedules, 200u);
  EXPECT_GT(r.fscans_compared, 0u);
  EXPECT_TRUE(r.ok());
  const auto id = make_function("identity", 2);
  EXPECT_TRUE(oracle_diff(2, id, 5, 4, 100, 1).ok());
}

TEST(Monitor, InitialFscanPicksHighestPid) {
  const auto f = make_function("sum-mod:10", 3);
  const auto programs = shapes({"f", "", ""});
  RandomSchedule sched(0);
  const SimConfig cfg{3, &f, 0};
  const auto run = run_simulated(cfg, programs, sched);
  const auto v = evaluate(cfg, programs, run);
  EXPECT_TRUE(v.ok());
  EXPECT_EQ(v.counts.at("winner-is-argmax"), 1u);
}

TEST(Monitor, CountsOnReferenceRuns) {
  const auto f = make_function("sum-mod:10", 2);
  const auto programs = alternating_programs(2, 2);
  RandomSchedule sched(5);
  const SimConfig cfg{2, &f, 0};
  const auto v = evaluate(cfg, programs, run_simulated(cfg, programs, sched));
  EXPECT_TRUE(v.ok());
  EXPECT_EQ(v.counts.at("update-shape"), 2u);
  EXPECT_EQ(v.counts.at("fscan-access"), 2u);
  EXPECT_EQ(v.counts.at("flag-disjoint"), 2u);
}

TEST(Bound, ShortRunStaysWithinBound) {
  const auto f = make_function("sum-mod:4", 3);
  BoundConfig bc;
  bc.f = &f;
  bc.updates = 2000;
  bc.sample_every = 500;
  const auto r = bound_check(bc);
  EXPECT_EQ(r.bound_per_segment, 3ull * 531441ull * 262144ull * 4ull);
  EXPECT_TRUE(r.within_bound());
  EXPECT_TRUE(r.v_grows());
  EXPECT_EQ(r.monitor_findings, 0u);
  EXPECT_EQ(r.curve.size(), 4u);
  EXPECT_EQ(r.updates, 2000u);
}

TEST(Bound, RequiresFiniteRange) {
  const auto f = make_function("identity", 3);
  BoundConfig bc;
  bc.f = &f;
  EXPECT_THROW(bound_check(bc), UsageError);
}

TEST(Bound, SaturatingBound) {
  EXPECT_EQ(flags_bound(40, 4), UINT64_MAX);
}
