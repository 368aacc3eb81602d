#pragma once

// The F-snapshot algorithm: per-process state, the update and Fscan
// procedures, and the local procedures classify / newflag / conflict /
// lt_s / find_max.
//
// update(v) performs exactly seven snapshot accesses, in order:
//   V.update, V.scan, VTS.scan, VTS.update, ViewSum.update, ViewSum.scan,
//   Flags.update
// and Fscan performs one: Flags.scan. Process exposes both as a step
// machine so a scheduler can interleave the accesses; local computation
// runs together with the access that precedes it.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fsnap/error.hpp"
#include "fsnap/function.hpp"
#include "fsnap/shmem.hpp"
#include "fsnap/timestamp.hpp"
#include "fsnap/types.hpp"

namespace fsnap {

/// Deliberate defects, used to show the harness can detect broken builds.
enum class Mutation : std::uint8_t {
  none,
  skip_null_clear,  // keep the second-previous view sum instead of clearing it
  constant_next,    // newts always picks the initial timestamp
};

inline const char* to_string(Mutation m) {
  switch (m) {
    case Mutation::none: return "none";
    case Mutation::skip_null_clear: return "skip-null-clear";
    case Mutation::constant_next: return "constant-next";
  }
  return "?";
}

inline Mutation parse_mutation(std::string_view s) {
  if (s == "none") return Mutation::none;
  if (s == "skip-null-clear") return Mutation::skip_null_clear;
  if (s == "constant-next") return Mutation::constant_next;
  throw UsageError("unknown mutation '" + std::string(s) + "'");
}

struct ProcessState {
  Pid pid = 0;
  std::size_t n = 0;
  std::uint64_t counter = 0;
  Color color = 0;
  std::uint64_t viewsum = 0;
  ViewTriple myview = initial_view_triple();
  VtsRow vts;
  PairSet winners;
  PairSet losers;
  Answer ans;
  Value val = 0;

  ProcessState() = default;
  ProcessState(Pid pid_, std::size_t n_, Answer initial_ans)
      : pid(pid_),
        n(n_),
        vts(initial_vts_row(n_)),
        winners(n_),
        losers(n_),
        ans(std::move(initial_ans)) {}
};

/// Sorts every (j, c) with a non-null view sum against state.viewsum;
/// pid breaks ties. Null slots land in neither set.
inline void classify(ProcessState& state, std::span<const ViewTriple> views) {
  state.winners = PairSet(state.n);
  state.losers = PairSet(state.n);
  const auto i = state.pid;
  for (Pid j = 0; j < views.size(); ++j) {
    for (Color c = 0; c < 3; ++c) {
      const auto& slot = views[j][c];
      if (!slot) continue;
      if (*slot > state.viewsum || (*slot == state.viewsum && i < j))
        state.winners.insert(j, c);
      if (*slot < state.viewsum || (*slot == state.viewsum && i > j))
        state.losers.insert(j, c);
    }
  }
}

inline Flag newflag(const ProcessState& state) {
  return Flag{state.color, state.vts, state.winners, state.losers, state.ans};
}

/// Both flags claim the other process is ahead, or both claim it is behind.
inline bool conflict(Pid i, const Flag& fi, Pid j, const Flag& fj) {
  return (fi.winners.contains(j, fj.color) && fj.winners.contains(i, fi.color)) ||
         (fi.losers.contains(j, fj.color) && fj.losers.contains(i, fi.color));
}

/// i <_S j: p_j's flag is more up to date than p_i's.
inline bool lt_s(Pid i, const Flag& fi, Pid j, const Flag& fj) {
  if (!conflict(i, fi, j, fj))
    return fj.losers.contains(i, fi.color) || fi.winners.contains(j, fj.color);
  const auto ti = fi.vts.at(j).new_ts;  // i's timestamp against j
  const auto tj = fj.vts.at(i).new_ts;
  // With conflicting claims, trust the flag carrying the later timestamp.
  if (dominates(tj, ti) && fj.losers.contains(i, fi.color)) return true;
  if (dominates(ti, tj) && fi.winners.contains(j, fj.color)) return true;
  return false;
}

/// Smallest pid that no other pid beats under lt_s. Throws NoMaximal if
/// every pid is beaten.
inline Pid find_max(std::span<const Flag> flags) {
  for (Pid i = 0; i < flags.size(); ++i) {
    bool maximal = true;
    for (Pid j = 0; j < flags.size() && maximal; ++j)
      if (j != i && lt_s(i, flags[i], j, flags[j])) maximal = false;
    if (maximal) return i;
  }
  throw NoMaximal("no maximal element among " + std::to_string(flags.size()) +
                  " flags");
}

/// Result of the step that finishes a high-level operation.
struct Completion {
  std::uint64_t hl_op = 0;
  OpKind op = OpKind::update;
  std::optional<Answer> ret;  // set for fscan
};

/// One process running the algorithm as a step machine.
class Process {
 public:
  Process(Pid pid, std::size_t n, const FFunction& f, Value x0,
          Mutation mutation = Mutation::none)
      : f_(&f),
        mutation_(mutation),
        state_(pid, n, initial_answer(f, n, x0)) {}

  const ProcessState& state() const noexcept { return state_; }
  Pid pid() const noexcept { return state_.pid; }
  bool idle() const noexcept { return pc_ == Pc::idle; }
  std::uint64_t current_op() const noexcept { return hl_op_; }

  /// Invocation of update(v): bumps the counter and picks the color.
  void begin_update(Value v, std::uint64_t hl_op) {
    require_idle();
    if (state_.counter == UINT64_MAX) throw Error("update counter overflow");
    ++state_.counter;
    state_.color = static_cast<Color>(state_.counter % 3);
    state_.val = v;
    hl_op_ = hl_op;
    op_ = OpKind::update;
    pc_ = Pc::v_update;
  }

  void begin_fscan(std::uint64_t hl_op) {
    require_idle();
    hl_op_ = hl_op;
    op_ = OpKind::fscan;
    pc_ = Pc::flags_scan;
  }

  /// Performs the next snapshot access and the local work after it.
  /// Returns the completion when this step finishes the operation.
  template <class Memory>
  std::optional<Completion> step(Memory& mem) {
    const AccessContext ctx{state_.pid, hl_op_, op_};
    const auto n = state_.n;
    const auto i = state_.pid;
    switch (pc_) {
      case Pc::idle:
        throw MisuseError("step() on an idle process");

      case Pc::v_update:
        mem.template update<VObject>(ctx, VEntry{state_.counter, state_.val});
        pc_ = Pc::v_scan;
        return std::nullopt;

      case Pc::v_scan: {
        v_view_ = mem.template scan<VObject>(ctx);
        std::vector<Value> vals(n);
        for (Pid j = 0; j < n; ++j) vals[j] = v_view_[j].val;
        state_.ans = (*f_)(vals);
        pc_ = Pc::vts_scan;
        return std::nullopt;
      }

      case Pc::vts_scan: {
        const auto rows = mem.template scan<VtsObject>(ctx);
        for (Pid j = 0; j < n; ++j) {
          if (mutation_ == Mutation::constant_next)
            state_.vts[j] = TimestampPair{state_.vts[j].new_ts, kInitialTimestamp};
          else
            state_.vts[j] = newts(rows[j][i], state_.vts[j]);
        }
        pc_ = Pc::vts_update;
        return std::nullopt;
      }

      case Pc::vts_update: {
        mem.template update<VtsObject>(ctx, state_.vts);
        std::uint64_t sum = 0;
        for (const auto& e : v_view_) sum += e.counter;
        state_.viewsum = sum;
        state_.myview[state_.color] = sum;
        if (mutation_ != Mutation::skip_null_clear)
          state_.myview[(state_.color + 1) % 3] = std::nullopt;
        pc_ = Pc::viewsum_update;
        return std::nullopt;
      }

      case Pc::viewsum_update:
        mem.template update<ViewSumObject>(ctx, state_.myview);
        pc_ = Pc::viewsum_scan;
        return std::nullopt;

      case Pc::viewsum_scan: {
        const auto views = mem.template scan<ViewSumObject>(ctx);
        classify(state_, views);
        flag_ = newflag(state_);
        pc_ = Pc::flags_update;
        return std::nullopt;
      }

      case Pc::flags_update:
        mem.template update<FlagsObject>(ctx, flag_);
        pc_ = Pc::idle;
        return Completion{hl_op_, OpKind::update, std::nullopt};

      case Pc::flags_scan: {
        const auto flags = mem.template scan<FlagsObject>(ctx);
        const auto winner = find_max(flags);
        pc_ = Pc::idle;
        return Completion{hl_op_, OpKind::fscan, flags[winner].ans};
      }
    }
    return std::nullopt;
  }

  /// Runs update(v) to completion without interleaving.
  template <class Memory>
  void update(Memory& mem, Value v, std::uint64_t hl_op) {
    begin_update(v, hl_op);
    while (!step(mem)) {
    }
  }

  template <class Memory>
  Answer fscan(Memory& mem, std::uint64_t hl_op) {
    begin_fscan(hl_op);
    std::optional<Completion> done;
    while (!(done = step(mem))) {
    }
    return *done->ret;
  }

 private:
  enum class Pc : std::uint8_t {
    idle,
    v_update,
    v_scan,
    vts_scan,
    vts_update,
    viewsum_update,
    viewsum_scan,
    flags_update,
    flags_scan,
  };

  void require_idle() const {
    if (pc_ != Pc::idle)
      throw MisuseError("process " + std::to_string(state_.pid) +
                        " already has an operation in progress");
  }

  const FFunction* f_;
  Mutation mutation_;
  ProcessState state_;
  Pc pc_ = Pc::idle;
  OpKind op_ = OpKind::update;
  std::uint64_t hl_op_ = 0;
  std::vector<VEntry> v_view_;
  Flag flag_;
};

}  // namespace fsnap
