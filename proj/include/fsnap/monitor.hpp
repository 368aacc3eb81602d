#pragma once

// Runtime invariant monitors over a simulated run's trace.
//
// The monitor consumes TraceEvents one at a time and never touches the run
// itself. It reconstructs everything it needs from the events: the view
// sum m of an update is the sum of counters in that update's V scan, and
// the m of a scanned flag is the m of the update that last wrote that
// segment (0 for initial flags).
//
// Monitors:
//   update-shape       an update performs exactly the 7 accesses in order
//   fscan-access       an Fscan performs exactly one access, a Flags scan
//   trace-steps        step numbers are dense and increasing
//   viewsum-slots      at most two non-null view sums after an update
//   flag-disjoint      winners and losers of a written flag are disjoint
//   ts-dominance       vts[j].new of a written flag dominates the pair read
//                      from VTS[j][i] in the same update
//   antisymmetry       never both i <_S j and j <_S i in a scanned vector
//   maximal-exists     find_max finds a maximal pid
//   order-matches-m    (m_i, i) < (m_j, j)  iff  i <_S j, for every pair
//   winner-is-argmax   find_max returns the lexicographic argmax of (m_i, i)

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fsnap/fcore.hpp"
#include "fsnap/schedule.hpp"
#include "fsnap/shmem.hpp"

namespace fsnap {

struct Finding {
  std::string monitor;
  std::uint64_t step = 0;
  std::uint64_t hl_op = 0;
  std::string detail;
};

/// Number of checks evaluated per monitor.
using MonitorCounts = std::map<std::string, std::uint64_t>;

inline void merge_counts(MonitorCounts& into, const MonitorCounts& from) {
  for (const auto& [k, v] : from) into[k] += v;
}

/// The 7 accesses of an update, in program order.
inline constexpr std::array<std::pair<ObjectId, AccessKind>, 7> kUpdateShape{{
    {ObjectId::V, AccessKind::update},
    {ObjectId::V, AccessKind::scan},
    {ObjectId::VTS, AccessKind::scan},
    {ObjectId::VTS, AccessKind::update},
    {ObjectId::ViewSum, AccessKind::update},
    {ObjectId::ViewSum, AccessKind::scan},
    {ObjectId::Flags, AccessKind::update},
}};

class Monitor {
 public:
  struct OpInfo {
    Pid pid = 0;
    OpKind kind = OpKind::update;
  };

  Monitor(std::size_t n, const Programs& programs, std::size_t max_findings = 64)
      : n_(n), max_findings_(max_findings), open_(n), seg_m_(n, 0) {
    for (const auto& p : programs)
      for (const auto& op : p.ops) ops_[op.hl_op] = OpInfo{p.pid, op.kind};
  }

  void on_event(const TraceEvent& e) {
    count("trace-steps");
    if (e.step != expected_step_)
      report("trace-steps", e, "expected step " + std::to_string(expected_step_));
    expected_step_ = e.step + 1;

    if (e.pid >= n_) {
      report("update-shape", e, "pid out of range");
      return;
    }
    auto& slot = open_[e.pid];
    if (slot && slot->hl_op != e.hl_op) close(*slot);
    if (!slot || slot->hl_op != e.hl_op) {
      auto it = ops_.find(e.hl_op);
      if (it == ops_.end() || it->second.pid != e.pid) {
        report("update-shape", e, "event for an op this pid does not run");
        slot.reset();
        return;
      }
      if (!started_.emplace(e.hl_op, true).second)
        report("update-shape", e, "op resumed after another op of its pid");
      slot = Open{e.hl_op, it->second.kind, e.step, {}, std::nullopt, std::nullopt};
    }
    slot->accesses.emplace_back(e.object, e.kind);

    if (slot->kind == OpKind::update) on_update_event(*slot, e);
    else on_fscan_event(e);
  }

  /// Closes every open op; also flags ops that never ran.
  void finish() {
    for (auto& slot : open_)
      if (slot) {
        close(*slot);
        slot.reset();
      }
    for (const auto& [id, info] : ops_) {
      if (started_.contains(id)) continue;
      const char* name = info.kind == OpKind::update ? "update-shape" : "fscan-access";
      count(name);
      report(name, TraceEvent{expected_step_, info.pid, {}, {}, {}, id},
             "operation performed no accesses");
    }
  }

  const std::vector<Finding>& findings() const noexcept { return findings_; }
  std::uint64_t finding_count() const noexcept { return total_findings_; }
  const MonitorCounts& counts() const noexcept { return counts_; }

 private:
  struct Open {
    std::uint64_t hl_op = 0;
    OpKind kind = OpKind::update;
    std::uint64_t first_step = 0;
    std::vector<std::pair<ObjectId, AccessKind>> accesses;
    std::optional<std::uint64_t> m;
    std::optional<std::vector<VtsRow>> vts_read;
  };

  void on_update_event(Open& op, const TraceEvent& e) {
    if (e.object == ObjectId::V && e.kind == AccessKind::scan) {
      if (const auto* view = std::get_if<std::vector<VEntry>>(&e.value)) {
        std::uint64_t m = 0;
        for (const auto& entry : *view) m += entry.counter;
        op.m = m;
      }
    } else if (e.object == ObjectId::VTS && e.kind == AccessKind::scan) {
      if (const auto* rows = std::get_if<std::vector<VtsRow>>(&e.value))
        op.vts_read = *rows;
    } else if (e.object == ObjectId::ViewSum && e.kind == AccessKind::update) {
      if (const auto* t = std::get_if<ViewTriple>(&e.value)) {
        count("viewsum-slots");
        int non_null = 0;
        for (const auto& s : *t) non_null += s.has_value();
        if (non_null > 2) report("viewsum-slots", e, "three non-null view sums");
      }
    } else if (e.object == ObjectId::Flags && e.kind == AccessKind::update) {
      if (const auto* flag = std::get_if<Flag>(&e.value)) on_flag_write(op, e, *flag);
    }
  }

  void on_flag_write(const Open& op, const TraceEvent& e, const Flag& flag) {
    count("flag-disjoint");
    if (flag.winners.intersects(flag.losers))
      report("flag-disjoint", e, "winners and losers intersect");

    if (op.vts_read) {
      const auto& rows = *op.vts_read;
      for (Pid j = 0; j < n_ && j < rows.size() && j < flag.vts.size(); ++j) {
        count("ts-dominance");
        const auto read = rows[j].at(e.pid);
        const auto mine = flag.vts[j].new_ts;
        if (!dominates(mine, read.old_ts) || !dominates(mine, read.new_ts))
          report("ts-dominance", e,
                 "vts[" + std::to_string(j) + "].new=" + std::to_string(mine.code()) +
                     " does not dominate read pair (" +
                     std::to_string(read.old_ts.code()) + "," +
                     std::to_string(read.new_ts.code()) + ")");
      }
    }
    seg_m_[e.pid] = op.m.value_or(0);
  }

  void on_fscan_event(const TraceEvent& e) {
    if (e.object != ObjectId::Flags || e.kind != AccessKind::scan) return;
    const auto* flags = std::get_if<std::vector<Flag>>(&e.value);
    if (!flags || flags->size() != n_) return;
    const auto& fs = *flags;

    for (Pid i = 0; i < n_; ++i) {
      for (Pid j = i + 1; j < n_; ++j) {
        count("antisymmetry");
        const bool ij = lt_s(i, fs[i], j, fs[j]);
        const bool ji = lt_s(j, fs[j], i, fs[i]);
        if (ij && ji)
          report("antisymmetry", e,
                 "both " + pair_text(i, j) + " and " + pair_text(j, i));
      }
    }

    for (Pid i = 0; i < n_; ++i) {
      for (Pid j = 0; j < n_; ++j) {
        if (i == j) continue;
        count("order-matches-m");
        const bool by_m = std::pair(seg_m_[i], i) < std::pair(seg_m_[j], j);
        if (by_m != lt_s(i, fs[i], j, fs[j]))
          report("order-matches-m", e,
                 "m=(" + std::to_string(seg_m_[i]) + "," + std::to_string(seg_m_[j]) +
                     ") but " + pair_text(i, j) + " is " +
                     (by_m ? "false" : "true"));
      }
    }

    Pid argmax = 0;
    for (Pid i = 1; i < n_; ++i)
      if (std::pair(seg_m_[i], i) > std::pair(seg_m_[argmax], argmax)) argmax = i;

    count("maximal-exists");
    count("winner-is-argmax");
    try {
      const auto winner = find_max(fs);
      if (winner != argmax)
        report("winner-is-argmax", e,
               "find_max=" + std::to_string(winner) + " argmax(m,i)=" +
                   std::to_string(argmax));
    } catch (const NoMaximal& ex) {
      report("maximal-exists", e, ex.what());
    }
  }

  void close(const Open& op) {
    if (op.kind == OpKind::update) {
      count("update-shape");
      const bool ok =
          op.accesses.size() == kUpdateShape.size() &&
          std::equal(op.accesses.begin(), op.accesses.end(), kUpdateShape.begin());
      if (!ok)
        report("update-shape", op, std::to_string(op.accesses.size()) +
                                       " accesses, not the 7-access sequence");
    } else {
      count("fscan-access");
      const bool ok = op.accesses.size() == 1 &&
                      op.accesses[0] == std::pair(ObjectId::Flags, AccessKind::scan);
      if (!ok)
        report("fscan-access", op,
               std::to_string(op.accesses.size()) + " accesses, not one Flags scan");
    }
  }

  static std::string pair_text(Pid i, Pid j) {
    return std::to_string(i) + "<_S" + std::to_string(j);
  }

  void count(const char* name) { ++counts_[name]; }

  void report(const std::string& name, const TraceEvent& e, std::string detail) {
    add({name, e.step, e.hl_op, std::move(detail)});
  }
  void report(const std::string& name, const Open& op, std::string detail) {
    add({name, op.first_step, op.hl_op, std::move(detail)});
  }
  void add(Finding f) {
    ++total_findings_;
    if (findings_.size() < max_findings_) findings_.push_back(std::move(f));
  }

  std::size_t n_;
  std::size_t max_findings_;
  std::unordered_map<std::uint64_t, OpInfo> ops_;
  std::unordered_map<std::uint64_t, bool> started_;
  std::vector<std::optional<Open>> open_;
  std::vector<std::uint64_t> seg_m_;
  std::uint64_t expected_step_ = 0;
  std::vector<Finding> findings_;
  std::uint64_t total_findings_ = 0;
  MonitorCounts counts_;
};

/// Aggregate access counts against the op mix of the programs: 7 accesses
/// per update in the fixed object/kind mix, one Flags scan per Fscan and
/// nothing else. Applies to both backends.
inline std::vector<Finding> check_access_counts(const AccessStats& stats,
                                                const Programs& programs) {
  std::vector<Finding> out;
  for (const auto& p : programs) {
    std::uint64_t updates = 0, fscans = 0;
    for (const auto& op : p.ops) (op.kind == OpKind::update ? updates : fscans)++;
    for (auto obj : kAllObjects) {
      for (auto kind : {AccessKind::update, AccessKind::scan}) {
        std::uint64_t want_u = 0;
        for (const auto& [o, k] : kUpdateShape)
          if (o == obj && k == kind) want_u += updates;
        const std::uint64_t want_f =
            (obj == ObjectId::Flags && kind == AccessKind::scan) ? fscans : 0;
        const auto got_u = stats.count(p.pid, OpKind::update, obj, kind);
        const auto got_f = stats.count(p.pid, OpKind::fscan, obj, kind);
        const std::string where = std::string(to_string(obj)) + "." + to_string(kind) +
                                  " by pid " + std::to_string(p.pid);
        if (got_u != want_u)
          out.push_back({"update-shape", 0, 0,
                         where + " in updates: " + std::to_string(got_u) +
                             " != " + std::to_string(want_u)});
        if (got_f != want_f)
          out.push_back({"fscan-access", 0, 0,
                         where + " in fscans: " + std::to_string(got_f) +
                             " != " + std::to_string(want_f)});
      }
    }
  }
  return out;
}

/// Trace event counts must equal the AccessStats counters.
inline std::vector<Finding> check_instrumentation(const AccessStats& stats,
                                                  const std::vector<TraceEvent>& trace,
                                                  const Programs& programs) {
  std::unordered_map<std::uint64_t, OpKind> kind_of;
  for (const auto& p : programs)
    for (const auto& op : p.ops) kind_of[op.hl_op] = op.kind;
  std::map<std::tuple<Pid, OpKind, ObjectId, AccessKind>, std::uint64_t> seen;
  for (const auto& e : trace) {
    auto it = kind_of.find(e.hl_op);
    if (it == kind_of.end()) continue;
    ++seen[{e.pid, it->second, e.object, e.kind}];
  }
  std::vector<Finding> out;
  for (Pid pid = 0; pid < stats.process_count(); ++pid)
    for (auto op : {OpKind::update, OpKind::fscan})
      for (auto obj : kAllObjects)
        for (auto kind : {AccessKind::update, AccessKind::scan}) {
          auto it = seen.find({pid, op, obj, kind});
          const auto traced = it == seen.end() ? 0 : it->second;
          if (traced != stats.count(pid, op, obj, kind))
            out.push_back({"instrumentation", 0, 0,
                           std::string(to_string(obj)) + "." + to_string(kind) +
                               " trace/stats mismatch for pid " + std::to_string(pid)});
        }
  return out;
}

}  // namespace fsnap
