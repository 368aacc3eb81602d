#pragma once

// Execution drivers: simulated and native runs, exhaustive exploration,
// seeded fuzzing, sequential differential testing, long-run boundedness
// checks and replay.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "fsnap/checker.hpp"
#include "fsnap/fcore.hpp"
#include "fsnap/monitor.hpp"
#include "fsnap/oracle.hpp"
#include "fsnap/schedule.hpp"
#include "fsnap/shmem.hpp"

namespace fsnap {

struct SimConfig {
  std::size_t n = 2;
  const FFunction* f = nullptr;
  Value x0 = 0;
  Mutation mutation = Mutation::none;
  bool record_trace = true;
  bool track_distinct = true;
  std::size_t distinct_cap = kDefaultDistinctCap;
};

struct RunResult {
  History history;
  std::vector<TraceEvent> trace;
  AccessStats stats;
  std::vector<Pid> schedule;  // pid of every step
  std::uint64_t steps = 0;
  std::optional<std::string> aborted;  // NoMaximal inside an Fscan
};

namespace detail {

inline void validate_programs(const Programs& programs, std::size_t n) {
  if (programs.size() != n)
    throw UsageError("need one program per process (" + std::to_string(n) + ")");
  for (Pid i = 0; i < n; ++i)
    if (programs[i].pid != i) throw UsageError("programs must be ordered by pid");
}

}  // namespace detail

/// Runs the programs on a fresh SimMemory under `schedule`. Each
/// scheduling decision runs exactly one atomic step of the chosen process.
inline RunResult run_simulated(const SimConfig& cfg, const Programs& programs,
                               ScheduleSource& schedule,
                               SimMemory::Observer observer = {}) {
  detail::validate_programs(programs, cfg.n);
  SimMemory mem(cfg.n, *cfg.f, cfg.x0,
                SimMemory::Options{cfg.record_trace, cfg.track_distinct,
                                   cfg.distinct_cap});
  if (observer) mem.set_observer(std::move(observer));

  std::vector<Process> procs;
  procs.reserve(cfg.n);
  for (Pid i = 0; i < cfg.n; ++i) procs.emplace_back(i, cfg.n, *cfg.f, cfg.x0, cfg.mutation);

  RunResult run;
  std::vector<std::size_t> next_op(cfg.n, 0);
  std::vector<Pid> runnable;
  std::vector<std::uint8_t> mid_op(cfg.n, 0);
  runnable.reserve(cfg.n);

  for (;;) {
    runnable.clear();
    for (Pid i = 0; i < cfg.n; ++i) {
      mid_op[i] = !procs[i].idle();
      if (mid_op[i] || next_op[i] < programs[i].ops.size()) runnable.push_back(i);
    }
    if (runnable.empty()) break;

    const auto pid = schedule.pick(DecisionPoint{runnable, mid_op, mem.steps()});
    if (std::find(runnable.begin(), runnable.end(), pid) == runnable.end())
      throw MisuseError("schedule picked a non-runnable pid");

    auto& proc = procs[pid];
    if (proc.idle()) {
      const auto& op = programs[pid].ops[next_op[pid]++];
      run.history.invoke(pid, op.kind, op.hl_op, op.arg);
      if (op.kind == OpKind::update) proc.begin_update(op.arg, op.hl_op);
      else proc.begin_fscan(op.hl_op);
    }
    run.schedule.push_back(pid);
    try {
      if (auto done = proc.step(mem))
        run.history.respond(pid, done->op, done->hl_op, std::move(done->ret));
    } catch (const NoMaximal& e) {
      run.aborted = e.what();
      break;
    }
  }
  run.steps = mem.steps();
  run.trace = mem.take_trace();
  run.stats = mem.take_stats();
  return run;
}

/// Runs each program on its own thread against a NativeMemory. The history
/// log is appended under a mutex before the first and after the last step
/// of every operation, so its order is consistent with real time.
inline RunResult run_native(const SimConfig& cfg, const Programs& programs) {
  detail::validate_programs(programs, cfg.n);
  NativeMemory mem(cfg.n, *cfg.f, cfg.x0, cfg.distinct_cap);
  RunResult run;
  std::mutex history_mutex;
  std::mutex abort_mutex;
  std::vector<std::thread> agents;
  agents.reserve(cfg.n);
  for (Pid i = 0; i < cfg.n; ++i) {
    agents.emplace_back([&, i] {
      Process proc(i, cfg.n, *cfg.f, cfg.x0, cfg.mutation);
      for (const auto& op : programs[i].ops) {
        {
          std::lock_guard lock(history_mutex);
          run.history.invoke(i, op.kind, op.hl_op, op.arg);
        }
        try {
          std::optional<Answer> ret;
          if (op.kind == OpKind::update) proc.update(mem, op.arg, op.hl_op);
          else ret = proc.fscan(mem, op.hl_op);
          std::lock_guard lock(history_mutex);
          run.history.respond(i, op.kind, op.hl_op, std::move(ret));
        } catch (const NoMaximal& e) {
          std::lock_guard lock(abort_mutex);
          run.aborted = e.what();
          return;
        }
      }
    });
  }
  for (auto& t : agents) t.join();
  run.stats = mem.stats();
  return run;
}

struct RunVerdict {
  std::vector<Finding> findings;
  std::uint64_t finding_count = 0;
  MonitorCounts counts;
  std::optional<CheckResult> check;

  bool ok() const noexcept { return finding_count == 0; }

  void add(Finding f) {
    ++finding_count;
    findings.push_back(std::move(f));
  }
};

/// Runs every monitor, the access-count checks and the linearizability
/// checker (with independent witness validation) on a finished run.
inline RunVerdict evaluate(const SimConfig& cfg, const Programs& programs,
                           const RunResult& run, bool with_trace_monitors = true) {
  RunVerdict v;
  if (with_trace_monitors) {
    Monitor monitor(cfg.n, programs);
    for (const auto& e : run.trace) monitor.on_event(e);
    if (!run.aborted) monitor.finish();
    v.findings = monitor.findings();
    v.finding_count = monitor.finding_count();
    v.counts = monitor.counts();
    for (auto& f : check_instrumentation(run.stats, run.trace, programs)) v.add(f);
  }
  if (run.aborted) {
    v.add({"maximal-exists", run.steps, 0, "run aborted: " + *run.aborted});
    return v;
  }
  ++v.counts["access-counts"];
  for (auto& f : check_access_counts(run.stats, programs)) v.add(f);

  ++v.counts["linearizability"];
  auto result = check(run.history, *cfg.f, cfg.n, cfg.x0);
  if (!result.linearizable) {
    v.add({"linearizability", run.steps, 0,
           "no linearization; longest prefix has " +
               std::to_string(result.longest_prefix.size()) + " ops"});
  } else {
    ++v.counts["witness-validation"];
    if (auto err = validate_witness(run.history, result.witness, *cfg.f, cfg.n, cfg.x0))
      v.add({"witness-validation", run.steps, 0, *err});
  }
  v.check = std::move(result);
  return v;
}

/// Runs fn(0..count-1) on `workers` threads; fn must only touch its own slot.
inline void parallel_for(std::size_t count, std::size_t workers,
                         const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// A failing run, with enough to reproduce it.
struct RunFailure {
  std::uint64_t index = 0;
  std::optional<std::uint64_t> seed;
  Programs programs;
  std::vector<Pid> schedule;
  std::vector<Finding> findings;
  std::vector<std::uint64_t> longest_prefix;
  std::vector<TraceEvent> trace;
};

// ---------------------------------------------------------------------------
// Exhaustive exploration

struct ExploreBudget {
  std::uint64_t max_steps = 18;
  std::uint64_t max_schedules = 1'000'000;
};

struct ExplorationReport {
  std::uint64_t schedules = 0;
  std::uint64_t total_steps = 0;  // atomic steps per schedule
  std::uint64_t duplicate_schedules = 0;
  bool budget_exceeded = false;
  std::uint64_t failed_schedules = 0;
  std::vector<RunFailure> failures;  // first few
  MonitorCounts counts;
  std::uint64_t fscans_checked = 0;

  bool ok() const noexcept {
    return failed_schedules == 0 && duplicate_schedules == 0 && !budget_exceeded;
  }
};

/// Enumerates every interleaving of the programs' atomic steps depth-first
/// and evaluates each complete run. Throws BudgetExceeded up front when the
/// programs need more steps than the budget allows; hitting the schedule
/// limit stops early with budget_exceeded set.
inline ExplorationReport explore(const SimConfig& cfg, const Programs& programs,
                                 const ExploreBudget& budget, std::size_t workers = 1,
                                 std::size_t keep_failures = 4) {
  ExplorationReport report;
  report.total_steps = total_steps(programs);
  if (report.total_steps > budget.max_steps)
    throw BudgetExceeded("programs need " + std::to_string(report.total_steps) +
                         " atomic steps; budget is " + std::to_string(budget.max_steps));

  DfsCursor cursor;
  std::unordered_set<std::string> seen;
  constexpr std::size_t kBatch = 512;
  bool more = true;
  while (more) {
    std::vector<RunResult> batch;
    while (more && batch.size() < kBatch) {
      if (report.schedules + batch.size() >= budget.max_schedules) {
        report.budget_exceeded = true;
        more = false;
        break;
      }
      batch.push_back(run_simulated(cfg, programs, cursor));
      std::string id(batch.back().schedule.begin(), batch.back().schedule.end());
      if (!seen.insert(std::move(id)).second) ++report.duplicate_schedules;
      more = cursor.advance();
    }
    std::vector<RunVerdict> verdicts(batch.size());
    parallel_for(batch.size(), workers,
                 [&](std::size_t i) { verdicts[i] = evaluate(cfg, programs, batch[i]); });
    for (std::size_t i = 0; i < batch.size(); ++i) {
      merge_counts(report.counts, verdicts[i].counts);
      if (!verdicts[i].ok()) {
        ++report.failed_schedules;
        if (report.failures.size() < keep_failures)
          report.failures.push_back({report.schedules + i, std::nullopt, programs,
                                     batch[i].schedule, verdicts[i].findings,
                                     verdicts[i].check ? verdicts[i].check->longest_prefix
                                                       : std::vector<std::uint64_t>{},
                                     std::move(batch[i].trace)});
      }
    }
    report.schedules += batch.size();
  }
  report.fscans_checked = report.counts["winner-is-argmax"];
  return report;
}

// ---------------------------------------------------------------------------
// Seeded fuzzing

enum class Backend { simulated, native };

struct FuzzConfig {
  std::size_t n = 4;
  const FFunction* f = nullptr;
  Value x0 = 0;
  std::size_t ops_per_proc = 3;
  std::uint64_t schedules = 1000;
  std::uint64_t seed = 0;
  Mutation mutation = Mutation::none;
  Backend backend = Backend::simulated;
  bool stop_on_failure = true;
  std::size_t workers = 1;
};

struct FuzzReport {
  std::uint64_t runs = 0;
  std::uint64_t failed_runs = 0;
  std::vector<std::uint64_t> run_seeds;
  std::vector<RunFailure> failures;
  MonitorCounts counts;
  /// Monitor name -> number of runs in which it fired.
  std::map<std::string, std::uint64_t> failures_by_monitor;

  bool ok() const noexcept { return failed_runs == 0; }
};

/// Programs and schedule of fuzz run `seed`: both derive from it alone.
inline Programs fuzz_programs(std::size_t n, std::size_t ops_per_proc,
                              std::uint64_t seed) {
  Rng rng(splitmix64(seed ^ 0x70726f6772616d73ull));
  return random_programs(n, ops_per_proc, rng);
}

inline FuzzReport fuzz(const FuzzConfig& fc) {
  FuzzReport report;
  const SimConfig cfg{fc.n, fc.f, fc.x0, fc.mutation, fc.backend == Backend::simulated};
  constexpr std::uint64_t kBatch = 256;
  for (std::uint64_t base = 0; base < fc.schedules; base += kBatch) {
    const auto count = std::min(kBatch, fc.schedules - base);
    std::vector<RunVerdict> verdicts(count);
    std::vector<RunResult> runs(count);
    std::vector<Programs> programs(count);
    parallel_for(count, fc.workers, [&](std::size_t k) {
      const auto seed = run_seed(fc.seed, base + k);
      programs[k] = fuzz_programs(fc.n, fc.ops_per_proc, seed);
      if (fc.backend == Backend::simulated) {
        RandomSchedule sched(seed);
        runs[k] = run_simulated(cfg, programs[k], sched);
      } else {
        runs[k] = run_native(cfg, programs[k]);
      }
      verdicts[k] = evaluate(cfg, programs[k], runs[k], fc.backend == Backend::simulated);
    });
    for (std::uint64_t k = 0; k < count; ++k) {
      const auto seed = run_seed(fc.seed, base + k);
      ++report.runs;
      report.run_seeds.push_back(seed);
      merge_counts(report.counts, verdicts[k].counts);
      if (verdicts[k].ok()) continue;
      ++report.failed_runs;
      std::set<std::string> fired;
      for (const auto& f : verdicts[k].findings) fired.insert(f.monitor);
      for (const auto& name : fired) ++report.failures_by_monitor[name];
      if (report.failures.size() < 4)
        report.failures.push_back({base + k, seed, programs[k], runs[k].schedule,
                                   verdicts[k].findings,
                                   verdicts[k].check ? verdicts[k].check->longest_prefix
                                                     : std::vector<std::uint64_t>{},
                                   std::move(runs[k].trace)});
      if (fc.stop_on_failure) return report;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Sequential differential test against the oracle

struct OracleDiffReport {
  std::uint64_t schedules = 0;
  std::uint64_t fscans_compared = 0;
  std::uint64_t mismatches = 0;
  std::vector<std::string> details;  // first few mismatches

  bool ok() const noexcept { return mismatches == 0; }
};

/// Alternates single-process runs (one random pid gets all the operations)
/// and round-robin runs; in both, operations execute one at a time. Every
/// Fscan result must equal the oracle replayed in the same order.
inline OracleDiffReport oracle_diff(std::size_t n, const FFunction& f, Value x0,
                                    std::size_t ops_per_proc, std::uint64_t schedules,
                                    std::uint64_t seed) {
  OracleDiffReport report;
  const SimConfig cfg{n, &f, x0, Mutation::none, false, false};
  for (std::uint64_t s = 0; s < schedules; ++s) {
    const auto rs = run_seed(seed, s);
    Rng rng(rs);
    Programs programs;
    const bool single = s % 2 == 0;
    if (single) {
      std::vector<std::vector<OpKind>> shapes(n);
      auto& mine = shapes[rng.below(n)];
      for (std::size_t k = 0; k < ops_per_proc * n; ++k)
        mine.push_back(rng.coin() ? OpKind::update : OpKind::fscan);
      programs = make_programs(std::move(shapes));
    } else {
      programs = random_programs(n, ops_per_proc, rng);
    }
    SequentialSchedule sched(single ? SequentialSchedule::Policy::random
                                    : SequentialSchedule::Policy::round_robin,
                             rs);
    const auto run = run_simulated(cfg, programs, sched);
    ++report.schedules;

    OracleState oracle(f, n, x0);
    for (const auto& e : run.history.events) {
      if (e.kind == EventKind::invoke) {
        if (e.op == OpKind::update) oracle.update(e.pid, e.arg);
        continue;
      }
      if (e.op != OpKind::fscan) continue;
      ++report.fscans_compared;
      if (!e.ret || *e.ret != oracle.fscan()) {
        ++report.mismatches;
        if (report.details.size() < 8)
          report.details.push_back("schedule " + std::to_string(s) + " hl_op " +
                                   std::to_string(e.hl_op));
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Long-run boundedness of the Flags object

struct BoundConfig {
  std::size_t n = 3;
  const FFunction* f = nullptr;
  Value x0 = 0;
  std::uint64_t updates = 100'000;
  std::uint64_t seed = 0;
  std::uint64_t sample_every = 1000;
  bool monitors = true;
};

struct BoundSample {
  std::uint64_t updates = 0;
  std::uint64_t flags_distinct = 0;
  std::uint64_t v_distinct = 0;
};

struct BoundReport {
  std::uint64_t updates = 0;
  std::uint64_t fscans = 0;
  std::vector<BoundSample> curve;
  std::vector<std::uint64_t> flags_distinct_per_segment;
  std::uint64_t bound_per_segment = 0;  // saturates at UINT64_MAX
  std::uint64_t flags_distinct_at_half = 0;
  std::uint64_t flags_distinct_final = 0;
  std::uint64_t v_distinct_at_half = 0;
  std::uint64_t v_distinct_final = 0;
  std::uint64_t last_new_flags_value_at = 0;  // update count when last seen
  std::uint64_t monitor_findings = 0;
  std::vector<Finding> findings;
  MonitorCounts counts;

  bool within_bound() const {
    return std::all_of(flags_distinct_per_segment.begin(),
                       flags_distinct_per_segment.end(),
                       [&](auto d) { return d <= bound_per_segment; });
  }
  bool plateaued() const { return flags_distinct_final == flags_distinct_at_half; }
  bool v_grows() const { return v_distinct_final > v_distinct_at_half; }
};

inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
  return a * b;
}

/// Distinct Flags values per segment are at most
/// 3 * 81^n * 4^(3n) * |D|: color, vts row, membership of each (j, c) in
/// winners/losers, ans.
inline std::uint64_t flags_bound(std::size_t n, std::uint64_t range_size) {
  std::uint64_t b = 3;
  for (std::size_t k = 0; k < n; ++k) b = saturating_mul(b, 81);
  for (std::size_t k = 0; k < 3 * n; ++k) b = saturating_mul(b, 4);
  return saturating_mul(b, range_size);
}

/// Programs for a bound-check run: the updates are spread over the
/// processes, each followed by an Fscan with probability 1/2.
inline Programs bound_programs(std::size_t n, std::uint64_t updates, Rng& rng) {
  std::vector<std::vector<OpKind>> shapes(n);
  for (std::uint64_t u = 0; u < updates; ++u) {
    auto& s = shapes[u % n];
    s.push_back(OpKind::update);
    if (rng.coin()) s.push_back(OpKind::fscan);
  }
  return make_programs(std::move(shapes));
}

inline BoundReport bound_check(const BoundConfig& bc) {
  if (!bc.f->finite_range)
    throw UsageError("bound-check needs a finite-range function");
  BoundReport report;
  Rng rng(splitmix64(bc.seed));
  const auto programs = bound_programs(bc.n, bc.updates, rng);
  const SimConfig cfg{bc.n, bc.f, bc.x0, Mutation::none, false, true};

  std::optional<Monitor> monitor;
  if (bc.monitors) monitor.emplace(bc.n, programs);
  const auto half = bc.updates / 2;
  std::uint64_t done = 0;
  std::uint64_t last_flags = 0;
  auto observer = [&](const TraceEvent& e, const AccessStats& stats) {
    if (monitor) monitor->on_event(e);
    if (e.kind == AccessKind::scan && e.object == ObjectId::Flags) ++report.fscans;
    if (e.kind != AccessKind::update || e.object != ObjectId::Flags) return;
    ++done;
    const auto flags = stats.distinct(ObjectId::Flags);
    if (flags != last_flags) {
      last_flags = flags;
      report.last_new_flags_value_at = done;
    }
    if (done == half) {
      report.flags_distinct_at_half = flags;
      report.v_distinct_at_half = stats.distinct(ObjectId::V);
    }
    if (done % bc.sample_every == 0 || done == bc.updates)
      report.curve.push_back({done, flags, stats.distinct(ObjectId::V)});
  };
  RandomSchedule sched(bc.seed);
  const auto run = run_simulated(cfg, programs, sched, observer);
  if (monitor) {
    monitor->finish();
    report.findings = monitor->findings();
    report.monitor_findings = monitor->finding_count();
    report.counts = monitor->counts();
  }
  if (run.aborted) {
    ++report.monitor_findings;
    report.findings.push_back({"maximal-exists", run.steps, 0, *run.aborted});
  }
  report.updates = done;
  report.flags_distinct_final = run.stats.distinct(ObjectId::Flags);
  report.v_distinct_final = run.stats.distinct(ObjectId::V);
  for (Pid i = 0; i < bc.n; ++i)
    report.flags_distinct_per_segment.push_back(run.stats.distinct(ObjectId::Flags, i));
  report.bound_per_segment = flags_bound(bc.n, bc.f->range_size);
  return report;
}

// ---------------------------------------------------------------------------
// Replay

/// Everything needed to re-execute a recorded simulated run.
struct TraceMeta {
  std::size_t n = 0;
  std::string function;
  Value x0 = 0;
  Mutation mutation = Mutation::none;
  Programs programs;
};

struct ReplayReport {
  bool reproduced = false;  // re-execution matches the recorded trace exactly
  std::string divergence;
  RunVerdict recorded;      // monitors on the recorded trace + checker
  bool ok() const noexcept { return reproduced && recorded.ok(); }
};

/// Re-executes the run along the trace's schedule projection, compares the
/// new trace to the recorded one, and evaluates monitors on the recorded
/// trace and the checker on the reproduced history.
inline ReplayReport replay(const TraceMeta& meta, const std::vector<TraceEvent>& recorded) {
  const auto f = make_function(meta.function, meta.n);
  const SimConfig cfg{meta.n, &f, meta.x0, meta.mutation, true};
  std::vector<Pid> pids;
  pids.reserve(recorded.size());
  for (const auto& e : recorded) pids.push_back(e.pid);

  ReplayReport report;
  RunResult rerun;
  try {
    ReplaySchedule sched(pids);
    rerun = run_simulated(cfg, meta.programs, sched);
    if (rerun.trace.size() != recorded.size()) {
      report.divergence = "re-execution produced " + std::to_string(rerun.trace.size()) +
                          " events, trace has " + std::to_string(recorded.size());
    } else {
      for (std::size_t k = 0; k < recorded.size(); ++k)
        if (!(rerun.trace[k] == recorded[k])) {
          report.divergence = "first difference at step " + std::to_string(k);
          break;
        }
    }
  } catch (const Error& e) {
    report.divergence = e.what();
  }
  report.reproduced = report.divergence.empty();

  RunResult view = std::move(rerun);
  view.trace = recorded;
  report.recorded = evaluate(cfg, meta.programs, view);
  if (!report.reproduced) report.recorded.add({"replay", 0, 0, report.divergence});
  return report;
}

// ---------------------------------------------------------------------------
// Benchmark

struct BenchReport {
  double simulated_seconds = 0;
  double native_seconds = 0;
  std::uint64_t updates = 0;
  std::uint64_t fscans = 0;
  double accesses_per_update = 0;
  double accesses_per_fscan = 0;
  std::uint64_t native_access_findings = 0;
};

inline BenchReport bench(std::size_t n, const FFunction& f, Value x0,
                         std::size_t ops_per_proc, std::uint64_t seed) {
  BenchReport report;
  Rng rng(seed);
  const auto programs = random_programs(n, ops_per_proc, rng);
  const SimConfig cfg{n, &f, x0, Mutation::none, false, false};

  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  RandomSchedule sched(seed);
  const auto sim = run_simulated(cfg, programs, sched);
  report.simulated_seconds = std::chrono::duration<double>(clock::now() - t0).count();

  t0 = clock::now();
  const auto native = run_native(cfg, programs);
  report.native_seconds = std::chrono::duration<double>(clock::now() - t0).count();

  std::uint64_t update_accesses = 0, fscan_accesses = 0;
  for (auto obj : kAllObjects)
    for (auto kind : {AccessKind::update, AccessKind::scan}) {
      update_accesses += sim.stats.count(OpKind::update, obj, kind);
      fscan_accesses += sim.stats.count(OpKind::fscan, obj, kind);
    }
  for (const auto& p : programs)
    for (const auto& op : p.ops) (op.kind == OpKind::update ? report.updates : report.fscans)++;
  if (report.updates) report.accesses_per_update = double(update_accesses) / report.updates;
  if (report.fscans) report.accesses_per_fscan = double(fscan_accesses) / report.fscans;
  report.native_access_findings = check_access_counts(native.stats, programs).size();
  return report;
}

}  // namespace fsnap
