#pragma once

// Process programs and schedule sources for simulated runs.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fsnap/error.hpp"
#include "fsnap/function.hpp"
#include "fsnap/shmem.hpp"

namespace fsnap {

inline constexpr std::uint64_t kUpdateSteps = 7;
inline constexpr std::uint64_t kFscanSteps = 1;

struct ProgramOp {
  OpKind kind = OpKind::update;
  Value arg = 0;
  std::uint64_t hl_op = 0;

  friend bool operator==(const ProgramOp&, const ProgramOp&) = default;
};

struct ProcessProgram {
  Pid pid = 0;
  std::vector<ProgramOp> ops;

  friend bool operator==(const ProcessProgram&, const ProcessProgram&) = default;
};

/// One program per pid, programs[i].pid == i.
using Programs = std::vector<ProcessProgram>;

/// Numbers every op pid-major, starting at 0.
inline void assign_op_ids(Programs& programs) {
  std::uint64_t id = 0;
  for (auto& p : programs)
    for (auto& op : p.ops) op.hl_op = id++;
}

/// Value of process i's k-th update (k >= 1); distinct across processes.
inline Value fresh_value(Pid i, std::size_t n, std::uint64_t k) {
  return static_cast<Value>(i + n * k);
}

/// Fills in update arguments with fresh values, in program order.
inline void assign_fresh_values(Programs& programs) {
  const auto n = programs.size();
  for (auto& p : programs) {
    std::uint64_t k = 0;
    for (auto& op : p.ops)
      if (op.kind == OpKind::update) op.arg = fresh_value(p.pid, n, ++k);
  }
}

inline Programs make_programs(std::vector<std::vector<OpKind>> shapes) {
  Programs out(shapes.size());
  for (Pid i = 0; i < shapes.size(); ++i) {
    out[i].pid = i;
    for (auto k : shapes[i]) out[i].ops.push_back(ProgramOp{k, 0, 0});
  }
  assign_fresh_values(out);
  assign_op_ids(out);
  return out;
}

/// update, fscan, update, ... truncated to ops_per_proc, for every pid.
inline Programs alternating_programs(std::size_t n, std::size_t ops_per_proc) {
  std::vector<std::vector<OpKind>> shapes(n);
  for (auto& s : shapes)
    for (std::size_t k = 0; k < ops_per_proc; ++k)
      s.push_back(k % 2 == 0 ? OpKind::update : OpKind::fscan);
  return make_programs(std::move(shapes));
}

/// "u f u" / "ufu" / "u,f" style program text.
inline std::vector<OpKind> parse_program_shape(std::string_view text) {
  std::vector<OpKind> out;
  for (char c : text) {
    if (c == 'u' || c == 'U') out.push_back(OpKind::update);
    else if (c == 'f' || c == 'F') out.push_back(OpKind::fscan);
    else if (c == ' ' || c == ',' || c == ';') continue;
    else throw UsageError("bad program '" + std::string(text) + "': use u and f");
  }
  return out;
}

inline std::uint64_t total_steps(const Programs& programs) {
  std::uint64_t steps = 0;
  for (const auto& p : programs)
    for (const auto& op : p.ops)
      steps += op.kind == OpKind::update ? kUpdateSteps : kFscanSteps;
  return steps;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Seed of run `index` within a batch seeded by `base`.
inline std::uint64_t run_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(splitmix64(base) ^ index);
}

/// Deterministic across platforms (unlike std distributions).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t below(std::uint64_t bound) { return engine_() % bound; }
  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

/// Each op is an update or an fscan with equal probability.
inline Programs random_programs(std::size_t n, std::size_t ops_per_proc, Rng& rng) {
  std::vector<std::vector<OpKind>> shapes(n);
  for (auto& s : shapes)
    for (std::size_t k = 0; k < ops_per_proc; ++k)
      s.push_back(rng.coin() ? OpKind::update : OpKind::fscan);
  return make_programs(std::move(shapes));
}

/// What a schedule source sees at a decision point.
struct DecisionPoint {
  std::span<const Pid> runnable;          // ascending
  std::span<const std::uint8_t> mid_op;   // indexed by pid
  std::uint64_t step = 0;
};

class ScheduleSource {
 public:
  virtual ~ScheduleSource() = default;
  /// Returns one of point.runnable.
  virtual Pid pick(const DecisionPoint& point) = 0;
};

class RandomSchedule final : public ScheduleSource {
 public:
  explicit RandomSchedule(std::uint64_t seed) : rng_(seed) {}
  Pid pick(const DecisionPoint& point) override {
    return point.runnable[rng_.below(point.runnable.size())];
  }

 private:
  Rng rng_;
};

/// Depth-first enumeration of all schedules. Run once per schedule, then
/// call advance(); it returns false when every schedule has been visited.
class DfsCursor final : public ScheduleSource {
 public:
  Pid pick(const DecisionPoint& point) override {
    if (depth_ < path_.size()) {
      auto& d = path_[depth_];
      if (d.count != point.runnable.size())
        throw Error("exhaustive cursor: nondeterministic replay of prefix");
    } else {
      path_.push_back({0, point.runnable.size()});
    }
    return point.runnable[path_[depth_++].choice];
  }

  bool advance() {
    depth_ = 0;
    while (!path_.empty() && path_.back().choice + 1 >= path_.back().count)
      path_.pop_back();
    if (path_.empty()) return false;
    ++path_.back().choice;
    return true;
  }

 private:
  struct Decision {
    std::size_t choice;
    std::size_t count;
  };
  std::vector<Decision> path_;
  std::size_t depth_ = 0;
};

/// Replays a recorded pid sequence.
class ReplaySchedule final : public ScheduleSource {
 public:
  explicit ReplaySchedule(std::vector<Pid> pids) : pids_(std::move(pids)) {}
  Pid pick(const DecisionPoint& point) override {
    if (pos_ >= pids_.size())
      throw Error("replay diverged: recorded schedule ended at step " +
                  std::to_string(point.step));
    const auto pid = pids_[pos_++];
    for (auto r : point.runnable)
      if (r == pid) return pid;
    throw Error("replay diverged: pid " + std::to_string(pid) +
                " not runnable at step " + std::to_string(point.step));
  }
  bool exhausted() const noexcept { return pos_ == pids_.size(); }

 private:
  std::vector<Pid> pids_;
  std::size_t pos_ = 0;
};

/// Runs whole operations one at a time: a process that is mid-operation is
/// always continued; between operations the next process is chosen round
/// robin or at random.
class SequentialSchedule final : public ScheduleSource {
 public:
  enum class Policy { round_robin, random };

  SequentialSchedule(Policy policy, std::uint64_t seed) : policy_(policy), rng_(seed) {}

  Pid pick(const DecisionPoint& point) override {
    for (auto r : point.runnable)
      if (point.mid_op[r]) return r;
    if (policy_ == Policy::random)
      return point.runnable[rng_.below(point.runnable.size())];
    for (auto r : point.runnable)
      if (r >= next_) {
        next_ = r + 1;
        return r;
      }
    next_ = point.runnable.front() + 1;
    return point.runnable.front();
  }

 private:
  Policy policy_;
  Rng rng_;
  Pid next_ = 0;
};

}  // namespace fsnap
