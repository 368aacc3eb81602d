#include <gtest/gtest.h>

#include <vector>

#include "fsnap/fcore.hpp"

using namespace fsnap;

namespace {

ProcessState state_for(Pid pid, std::size_t n, std::uint64_t viewsum, Color color = 1) {
  ProcessState s(pid, n, Answer{std::uint64_t{0}});
  s.viewsum = viewsum;
  s.color = color;
  return s;
}

std::vector<ViewTriple> empty_views(std::size_t n) {
  return std::vector<ViewTriple>(n, ViewTriple{});
}

std::vector<Flag> initial_flags(std::size_t n) {
  std::vector<Flag> out;
  for (Pid i = 0; i < n; ++i) out.push_back(initial_flag(i, n, Answer{std::uint64_t{0}}));
  return out;
}

Flag blank_flag(std::size_t n, Color color) {
  Flag f = initial_flag(0, n, Answer{std::uint64_t{0}});
  f.color = color;
  f.winners = PairSet(n);
  f.losers = PairSet(n);
  return f;
}

Timestamp ts(int c, int i) {
  return Timestamp{static_cast<std::uint8_t>(c), static_cast<std::uint8_t>(i)};
}

}  // namespace

TEST(Classify, GreaterSumIsWinner) {
  auto s = state_for(2, 5, 5);
  auto views = empty_views(5);
  views[3] = ViewTriple{7, std::nullopt, std::nullopt};
  classify(s, views);
  EXPECT_TRUE(s.winners.contains(3, 0));
  EXPECT_FALSE(s.losers.contains(3, 0));
}

TEST(Classify, TieBrokenByPid) {
  auto views = empty_views(5);
  views[3] = ViewTriple{5, std::nullopt, std::nullopt};
  auto low = state_for(2, 5, 5);
  classify(low, views);
  EXPECT_TRUE(low.winners.contains(3, 0));
  auto high = state_for(4, 5, 5);
  classify(high, views);
  EXPECT_TRUE(high.losers.contains(3, 0));
  EXPECT_FALSE(high.winners.contains(3, 0));
}

TEST(Classify, NullSlotsProduceNoPair) {
  auto s = state_for(0, 3, 4);
  auto views = empty_views(3);
  views[1] = ViewTriple{std::nullopt, 9, std::nullopt};
  classify(s, views);
  EXPECT_TRUE(s.winners.contains(1, 1));
  EXPECT_FALSE(s.winners.contains(1, 0));
  EXPECT_FALSE(s.losers.contains(1, 0));
  EXPECT_FALSE(s.winners.contains(1, 2));
  EXPECT_FALSE(s.losers.contains(1, 2));
  EXPECT_EQ(s.winners.size() + s.losers.size(), 1u);
}

TEST(Classify, SelfPairsOnly) {
  // Own view after the second update: color 2 holds the current sum, the
  // stale color-0 slot holds an older, smaller sum.
  auto s = state_for(1, 3, 6, 2);
  auto views = empty_views(3);
  views[1] = ViewTriple{0, std::nullopt, 6};
  classify(s, views);
  EXPECT_FALSE(s.winners.contains(1, 2));
  EXPECT_FALSE(s.losers.contains(1, 2));
  EXPECT_TRUE(s.losers.contains(1, 0));
  EXPECT_EQ(s.winners.size(), 0u);
  EXPECT_EQ(s.losers.size(), 1u);
}

TEST(Conflict, InitialFlagsDoNotConflict) {
  const auto flags = initial_flags(4);
  for (Pid i = 0; i < 4; ++i)
    for (Pid j = 0; j < 4; ++j)
      if (i != j) {
        EXPECT_FALSE(conflict(i, flags[i], j, flags[j]));
      }
}

TEST(Conflict, MutualWinnersAtMatchingColors) {
  auto fi = blank_flag(2, 1), fj = blank_flag(2, 2);
  fi.winners.insert(1, 2);
  fj.winners.insert(0, 1);
  EXPECT_TRUE(conflict(0, fi, 1, fj));
  EXPECT_TRUE(conflict(1, fj, 0, fi));
}

TEST(Conflict, StaleColorIsIgnored) {
  auto fi = blank_flag(2, 1), fj = blank_flag(2, 2);
  fi.winners.insert(1, 0);  // fj now carries color 2
  fj.winners.insert(0, 1);
  EXPECT_FALSE(conflict(0, fi, 1, fj));
}

TEST(LtS, InitialChain) {
  const auto flags = initial_flags(3);
  for (Pid i = 0; i < 3; ++i)
    for (Pid j = i + 1; j < 3; ++j) {
      EXPECT_TRUE(lt_s(i, flags[i], j, flags[j]));
      EXPECT_FALSE(lt_s(j, flags[j], i, flags[i]));
    }
}

TEST(LtS, ConflictResolvedByDominance) {
  auto fi = blank_flag(2, 1), fj = blank_flag(2, 1);
  fi.winners.insert(1, 1);
  fj.winners.insert(0, 1);
  fi.vts[1].new_ts = ts(1, 0);
  fj.vts[0].new_ts = ts(0, 0);
  ASSERT_TRUE(conflict(0, fi, 1, fj));
  ASSERT_TRUE(dominates(fi.vts[1].new_ts, fj.vts[0].new_ts));
  EXPECT_TRUE(lt_s(0, fi, 1, fj));
  EXPECT_FALSE(lt_s(1, fj, 0, fi));
}

TEST(LtS, ConflictWithoutDominanceIsUnordered) {
  auto fi = blank_flag(2, 1), fj = blank_flag(2, 1);
  fi.losers.insert(1, 1);
  fj.losers.insert(0, 1);
  fi.vts[1].new_ts = ts(0, 0);
  fj.vts[0].new_ts = ts(0, 0);
  ASSERT_TRUE(conflict(0, fi, 1, fj));
  EXPECT_FALSE(lt_s(0, fi, 1, fj));
  EXPECT_FALSE(lt_s(1, fj, 0, fi));
}

TEST(FindMax, InitialFlags) {
  for (std::size_t n = 1; n <= 6; ++n) EXPECT_EQ(find_max(initial_flags(n)), n - 1);
}

TEST(FindMax, NoMaximalThrows) {
  // 0 < 1 < 2 < 0 through plain membership.
  std::vector<Flag> flags{blank_flag(3, 0), blank_flag(3, 0), blank_flag(3, 0)};
  flags[0].winners.insert(1, 0);
  flags[1].winners.insert(2, 0);
  flags[2].winners.insert(0, 0);
  EXPECT_THROW(find_max(flags), NoMaximal);
}

TEST(FindMax, SmallestMaximalOnTies) {
  std::vector<Flag> flags{blank_flag(3, 0), blank_flag(3, 0), blank_flag(3, 0)};
  EXPECT_EQ(find_max(flags), 0u);
}

TEST(Process, FirstUpdateLocalState) {
  const auto f = make_function("sum-mod:10", 2);
  SimMemory mem(2, f, 0);
  Process p0(0, 2, f, 0);
  p0.update(mem, 5, 0);
  const auto& s = p0.state();
  EXPECT_EQ(s.counter, 1u);
  EXPECT_EQ(s.color, 1);
  EXPECT_EQ(s.myview[0], std::optional<std::uint64_t>{0});
  EXPECT_EQ(s.myview[1], std::optional<std::uint64_t>{s.viewsum});
  EXPECT_EQ(s.myview[2], std::nullopt);
  EXPECT_EQ(s.viewsum, 1u);
}

TEST(Process, SoloUpdateThenFscan) {
  const auto f = make_function("sum-mod:10", 2);
  SimMemory mem(2, f, 0);
  Process p0(0, 2, f, 0), p1(1, 2, f, 0);
  p0.update(mem, 3, 0);
  EXPECT_EQ(p1.fscan(mem, 1), Answer{std::uint64_t{3}});
}

TEST(Process, SecondUpdaterSeesBothCounters) {
  const auto f = make_function("sum-mod:10", 2);
  SimMemory mem(2, f, 0);
  Process p0(0, 2, f, 0), p1(1, 2, f, 0);
  p0.update(mem, 3, 0);
  p1.update(mem, 4, 1);
  EXPECT_EQ(p1.state().viewsum, 2u);
}

TEST(Process, NewflagAfterFirstSoloUpdate) {
  const auto f = make_function("sum-mod:10", 2);
  SimMemory mem(2, f, 0);
  Process p0(0, 2, f, 0);
  p0.update(mem, 3, 0);
  const auto& flag = mem.state().flags[0];
  EXPECT_EQ(flag.color, 1);
  EXPECT_EQ(flag.ans, Answer{std::uint64_t{3}});
  EXPECT_EQ(flag, newflag(p0.state()));
  // p1's ViewSum still holds its initial (0, null, null): 0 < 1.
  EXPECT_TRUE(flag.losers.contains(1, 0));
  EXPECT_FALSE(flag.winners.intersects(flag.losers));
}

TEST(Process, InitialFscan) {
  const auto f = make_function("sum-mod:5", 3);
  SimMemory mem(3, f, 0);
  Process p(1, 3, f, 0);
  EXPECT_EQ(p.fscan(mem, 0), Answer{std::uint64_t{0}});
}

TEST(Process, MaxPidAfterOneUpdate) {
  const auto f = make_function("max-pid", 2);
  SimMemory mem(2, f, 0);
  Process p0(0, 2, f, 0), p1(1, 2, f, 0);
  p0.update(mem, 7, 0);
  EXPECT_EQ(p1.fscan(mem, 1), Answer{std::uint64_t{0}});
}

TEST(Process, SevenAccessesPerUpdateOneForFscan) {
  const auto f = make_function("sum-mod:10", 2);
  SimMemory mem(2, f, 0);
  Process p0(0, 2, f, 0);
  p0.begin_update(1, 0);
  int steps = 0;
  while (!p0.step(mem)) ++steps;
  EXPECT_EQ(steps + 1, 7);
  p0.begin_fscan(1);
  EXPECT_TRUE(p0.step(mem).has_value());
  EXPECT_EQ(mem.steps(), 8u);
}

TEST(Process, Misuse) {
  const auto f = make_function("sum-mod:10", 2);
  SimMemory mem(2, f, 0);
  Process p0(0, 2, f, 0);
  EXPECT_THROW(p0.step(mem), MisuseError);
  p0.begin_fscan(0);
  EXPECT_THROW(p0.begin_update(1, 1), MisuseError);
}

TEST(Mutation, Parse) {
  EXPECT_EQ(parse_mutation("none"), Mutation::none);
  EXPECT_EQ(parse_mutation("skip-null-clear"), Mutation::skip_null_clear);
  EXPECT_EQ(parse_mutation("constant-next"), Mutation::constant_next);
  EXPECT_THROW(parse_mutation("other"), UsageError);
}
