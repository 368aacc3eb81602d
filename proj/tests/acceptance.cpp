// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria (0 when all pass).

#include <chrono>
#include <cstdio>
#include <string>

#include "fsnap/fsnap.hpp"

using namespace fsnap;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void verdict(int id, const char* title, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("%s  %d %s: %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
}

std::uint64_t count(const MonitorCounts& c, const std::string& name) {
  const auto it = c.find(name);
  return it == c.end() ? 0 : it->second;
}

std::string num(std::uint64_t v) { return std::to_string(v); }

std::string secs(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", s);
  return buf;
}

void timestamp_table() {
  const auto t0 = Clock::now();
  int covered = 0, asym = 0, bad = 0;
  for (int a = 0; a < kTimestampCount; ++a) {
    for (int b = 0; b < kTimestampCount; ++b) {
      const auto v = Timestamp::from_code(a), u = Timestamp::from_code(b);
      const auto w = next(v, u);
      if (dominates(w, v) && dominates(w, u)) ++covered;
      else ++bad;
      if (a != b) {
        if (!(dominates(v, u) && dominates(u, v))) ++asym;
        else ++bad;
      }
    }
  }
  const double s = seconds_since(t0);
  verdict(1, "timestamp table", covered == 81 && asym == 72 && bad == 0 && s < 1.0,
          num(covered) + "/81 next() dominate both, " + num(asym) +
              "/72 pairs without mutual dominance, " + secs(s));
}

// Shared between criteria 2-5.
ExplorationReport explored;
FuzzReport fuzzed;

void exhaustive() {
  const auto f = make_function("sum-mod:10", 2);
  const SimConfig cfg{2, &f, 0};
  const auto programs = alternating_programs(2, 2);
  const auto t0 = Clock::now();
  explored = explore(cfg, programs, ExploreBudget{}, 1, 4);
  const double s = seconds_since(t0);
  verdict(2, "exhaustive linearizability",
          explored.ok() && explored.schedules == 12870 && s < 60.0,
          num(explored.schedules) + " schedules (expected 16!/(8!8!) = 12870), " +
              num(explored.failed_schedules) + " failed, " +
              num(explored.duplicate_schedules) + " duplicates, " + secs(s));
}

void fuzzing() {
  const auto f = make_function("sum-mod:5", 4);
  FuzzConfig fc;
  fc.n = 4;
  fc.f = &f;
  fc.ops_per_proc = 3;
  fc.schedules = 10'000;
  fc.seed = 42;
  fc.stop_on_failure = false;
  const auto t0 = Clock::now();
  fuzzed = fuzz(fc);
  const double s = seconds_since(t0);
  verdict(3, "fuzz linearizability",
          fuzzed.ok() && fuzzed.runs == 10'000 && s < 600.0,
          num(fuzzed.runs) + " runs, " + num(fuzzed.failed_runs) + " failed, " +
              num(count(fuzzed.counts, "linearizability")) + " histories checked, " + secs(s));
}

bool fired(const std::string& name) {
  if (fuzzed.failures_by_monitor.contains(name)) return true;
  for (const auto& f : explored.failures)
    for (const auto& finding : f.findings)
      if (finding.monitor == name) return true;
  return false;
}

void order_monitors() {
  const auto fscans = count(explored.counts, "winner-is-argmax") +
                      count(fuzzed.counts, "winner-is-argmax");
  const auto pairs = count(explored.counts, "order-matches-m") +
                     count(fuzzed.counts, "order-matches-m");
  const auto maximal = count(explored.counts, "maximal-exists") +
                       count(fuzzed.counts, "maximal-exists");
  const bool clean = !fired("winner-is-argmax") && !fired("order-matches-m") &&
                     !fired("maximal-exists") && !fired("antisymmetry");
  verdict(4, "find_max equals argmax of (m_i, i)",
          clean && fscans > 0 && maximal == fscans && explored.failed_schedules == 0 &&
              fuzzed.failed_runs == 0,
          num(fscans) + " Fscans and " + num(pairs) +
              " ordered pairs checked, NoMaximal never raised");
}

void access_restriction() {
  const auto updates = count(explored.counts, "update-shape") +
                       count(fuzzed.counts, "update-shape");
  const auto fscans = count(explored.counts, "fscan-access") +
                      count(fuzzed.counts, "fscan-access");
  const auto runs = count(explored.counts, "access-counts") +
                    count(fuzzed.counts, "access-counts");
  const bool clean = !fired("update-shape") && !fired("fscan-access") &&
                     !fired("access-counts") && !fired("trace-steps");
  verdict(5, "access restriction", clean && updates > 0 && fscans > 0,
          num(updates) + " updates with 7 accesses in order, " + num(fscans) +
              " Fscans with one Flags scan, stats cross-checked in " + num(runs) + " runs");
}

void boundedness() {
  const auto f = make_function("sum-mod:4", 3);
  BoundConfig bc;
  bc.n = 3;
  bc.f = &f;
  bc.updates = 100'000;
  bc.seed = 42;
  bc.sample_every = 10'000;
  const auto t0 = Clock::now();
  const auto r = bound_check(bc);
  const double s = seconds_since(t0);
  std::uint64_t worst = 0;
  for (auto d : r.flags_distinct_per_segment) worst = std::max(worst, d);
  verdict(6, "Flags boundedness",
          r.within_bound() && r.plateaued() && r.v_grows() && r.monitor_findings == 0,
          "max per-segment distinct " + num(worst) + " <= bound " + num(r.bound_per_segment) +
              (r.within_bound() ? " (ok)" : " (EXCEEDED)") + "; Flags distinct " +
              num(r.flags_distinct_at_half) + " at 50% -> " + num(r.flags_distinct_final) +
              " at 100%" + (r.plateaued() ? " (plateau)" : " (no plateau)") +
              "; V distinct " + num(r.v_distinct_at_half) + " -> " + num(r.v_distinct_final) +
              "; " + secs(s));
}

void sequential_diff() {
  std::uint64_t schedules = 0, fscans = 0, mismatches = 0;
  for (const char* spec : {"sum-mod:5", "max-pid", "identity"}) {
    const auto f = make_function(spec, 3);
    const auto r = oracle_diff(3, f, 0, 4, 1000, 7);
    schedules += r.schedules;
    fscans += r.fscans_compared;
    mismatches += r.mismatches;
  }
  verdict(7, "sequential differential test", mismatches == 0 && fscans > 0,
          num(schedules) + " sequential schedules (1000 each for sum-mod:5, max-pid, "
                           "identity), " +
              num(fscans) + " Fscans compared, " + num(mismatches) + " mismatches");
}

void mutation_sensitivity() {
  const auto f = make_function("sum-mod:5", 4);
  bool all = true;
  std::string detail;
  for (auto m : {Mutation::skip_null_clear, Mutation::constant_next}) {
    FuzzConfig fc;
    fc.n = 4;
    fc.f = &f;
    fc.schedules = 10'000;
    fc.seed = 42;
    fc.mutation = m;
    const auto r = fuzz(fc);
    all = all && !r.ok();
    if (!detail.empty()) detail += "; ";
    detail += std::string(to_string(m)) + ": ";
    if (r.ok()) {
      detail += "undetected in " + num(r.runs) + " runs";
    } else {
      detail += "caught at run " + num(r.failures.front().index) + " by";
      for (const auto& [name, n] : r.failures_by_monitor) detail += " " + name;
    }
  }
  verdict(8, "mutation sensitivity", all, detail);
}

}  // namespace

int main() {
  try {
    timestamp_table();
    exhaustive();
    fuzzing();
    order_monitors();
    access_restriction();
    boundedness();
    sequential_diff();
    mutation_sensitivity();
  } catch (const std::exception& e) {
    std::printf("FAIL  acceptance aborted: %s\n", e.what());
    return 100;
  }
  std::printf("%d of 8 criteria failed\n", failures);
  return failures;
}
