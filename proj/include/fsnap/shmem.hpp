#pragma once

// Shared-memory substrate: four n-segment single-writer snapshot objects
// behind two backends.
//
// SimMemory runs in one context under an external scheduler. Every update
// or scan is one atomic step that gets a dense step number and (optionally)
// one TraceEvent. NativeMemory is safe for n concurrent agents; each object
// is a coarse linearizable snapshot guarded by its own mutex.
//
// Both backends count accesses per (pid, high-level op kind, object, access
// kind) and track the distinct values ever written to each object.

#include <array>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "fsnap/error.hpp"
#include "fsnap/function.hpp"
#include "fsnap/types.hpp"

namespace fsnap {

enum class ObjectId : std::uint8_t { V = 0, VTS = 1, ViewSum = 2, Flags = 3 };
enum class AccessKind : std::uint8_t { update = 0, scan = 1 };
enum class OpKind : std::uint8_t { update = 0, fscan = 1 };

inline constexpr std::array<ObjectId, 4> kAllObjects{
    ObjectId::V, ObjectId::VTS, ObjectId::ViewSum, ObjectId::Flags};

inline const char* to_string(ObjectId o) {
  switch (o) {
    case ObjectId::V: return "V";
    case ObjectId::VTS: return "VTS";
    case ObjectId::ViewSum: return "ViewSum";
    case ObjectId::Flags: return "Flags";
  }
  return "?";
}
inline const char* to_string(AccessKind k) {
  return k == AccessKind::update ? "update" : "scan";
}
inline const char* to_string(OpKind k) {
  return k == OpKind::update ? "update" : "fscan";
}

// Object tags: bind an object id to its segment type.
struct VObject {
  using value_type = VEntry;
  static constexpr ObjectId id = ObjectId::V;
};
struct VtsObject {
  using value_type = VtsRow;
  static constexpr ObjectId id = ObjectId::VTS;
};
struct ViewSumObject {
  using value_type = ViewTriple;
  static constexpr ObjectId id = ObjectId::ViewSum;
};
struct FlagsObject {
  using value_type = Flag;
  static constexpr ObjectId id = ObjectId::Flags;
};

/// Written value for an update event, the full vector for a scan event.
using TraceValue =
    std::variant<VEntry, VtsRow, ViewTriple, Flag, std::vector<VEntry>,
                 std::vector<VtsRow>, std::vector<ViewTriple>, std::vector<Flag>>;

struct TraceEvent {
  std::uint64_t step = 0;
  Pid pid = 0;
  ObjectId object = ObjectId::V;
  AccessKind kind = AccessKind::update;
  TraceValue value;
  std::uint64_t hl_op = 0;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

/// Who is accessing: the process and the high-level operation it runs.
struct AccessContext {
  Pid pid = 0;
  std::uint64_t hl_op = 0;
  OpKind op = OpKind::update;
};

/// Segment arrays of the four objects.
struct SharedState {
  std::vector<VEntry> v;
  std::vector<VtsRow> vts;
  std::vector<ViewTriple> viewsum;
  std::vector<Flag> flags;

  static SharedState initial(std::size_t n, const FFunction& f, Value x0) {
    SharedState s;
    s.v.assign(n, VEntry{0, x0});
    s.vts.assign(n, initial_vts_row(n));
    s.viewsum.assign(n, initial_view_triple());
    const auto ans = initial_answer(f, n, x0);
    s.flags.reserve(n);
    for (Pid i = 0; i < n; ++i) s.flags.push_back(initial_flag(i, n, ans));
    return s;
  }

  template <class Tag>
  auto& segments() {
    if constexpr (Tag::id == ObjectId::V) return v;
    else if constexpr (Tag::id == ObjectId::VTS) return vts;
    else if constexpr (Tag::id == ObjectId::ViewSum) return viewsum;
    else return flags;
  }
  template <class Tag>
  const auto& segments() const {
    return const_cast<SharedState*>(this)->segments<Tag>();
  }
};

inline constexpr std::size_t kDefaultDistinctCap = std::size_t{1} << 20;

class AccessStats {
 public:
  AccessStats() = default;
  explicit AccessStats(std::size_t n, std::size_t distinct_cap = kDefaultDistinctCap)
      : n_(n), cap_(distinct_cap), counts_(n * kCells, 0) {
    for (auto& per : per_segment_) per.assign(n, 0);
  }

  std::size_t process_count() const noexcept { return n_; }

  void record(const AccessContext& ctx, ObjectId obj, AccessKind kind) {
    ++counts_.at(index(ctx.pid, ctx.op, obj, kind));
  }

  std::uint64_t count(Pid pid, OpKind op, ObjectId obj, AccessKind kind) const {
    return counts_.at(index(pid, op, obj, kind));
  }

  /// Sum over all pids.
  std::uint64_t count(OpKind op, ObjectId obj, AccessKind kind) const {
    std::uint64_t total = 0;
    for (Pid p = 0; p < n_; ++p) total += count(p, op, obj, kind);
    return total;
  }

  void set_distinct_tracking(bool on) noexcept { track_distinct_ = on; }
  bool distinct_tracking() const noexcept { return track_distinct_; }

  /// Registers a value written to `segment` of `obj`. Throws CapExceeded
  /// once an object's distinct set would grow past the cap.
  template <class T>
  void note_written(ObjectId obj, Pid segment, const T& value) {
    const auto o = static_cast<std::size_t>(obj);
    ++writes_[o];
    if (!track_distinct_) return;
    std::string key = encoding::encode(value);
    encoding::put_u64(key, segment);
    if (seen_[o].contains(key)) return;
    if (seen_[o].size() >= cap_)
      throw CapExceeded(std::string("distinct-value cap of ") +
                        std::to_string(cap_) + " reached for object " +
                        to_string(obj));
    digest_[o] += fnv1a(key);
    seen_[o].insert(std::move(key));
    ++per_segment_[o].at(segment);
  }

  /// Distinct (segment, value) pairs ever written to obj, initial values included.
  std::uint64_t distinct(ObjectId obj) const {
    return seen_[static_cast<std::size_t>(obj)].size();
  }
  std::uint64_t distinct(ObjectId obj, Pid segment) const {
    return per_segment_[static_cast<std::size_t>(obj)].at(segment);
  }
  /// Order-independent digest of the distinct set.
  std::uint64_t digest(ObjectId obj) const {
    return digest_[static_cast<std::size_t>(obj)];
  }
  std::uint64_t writes(ObjectId obj) const {
    return writes_[static_cast<std::size_t>(obj)];
  }

 private:
  static constexpr std::size_t kCells = 2 * 4 * 2;  // op kind x object x access

  std::size_t index(Pid pid, OpKind op, ObjectId obj, AccessKind kind) const {
    if (pid >= n_) throw MisuseError("pid " + std::to_string(pid) + " out of range");
    return pid * kCells + static_cast<std::size_t>(op) * 8 +
           static_cast<std::size_t>(obj) * 2 + static_cast<std::size_t>(kind);
  }

  static std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return h;
  }

  std::size_t n_ = 0;
  std::size_t cap_ = kDefaultDistinctCap;
  bool track_distinct_ = true;
  std::vector<std::uint64_t> counts_;
  std::array<std::unordered_set<std::string>, 4> seen_;
  std::array<std::vector<std::uint64_t>, 4> per_segment_;
  std::array<std::uint64_t, 4> digest_{};
  std::array<std::uint64_t, 4> writes_{};
};

namespace detail {

inline void check_pid(Pid pid, std::size_t n) {
  if (pid >= n)
    throw MisuseError("pid " + std::to_string(pid) + " out of range for n=" +
                      std::to_string(n));
}

inline void register_initial_values(AccessStats& stats, const SharedState& s) {
  for (Pid i = 0; i < s.v.size(); ++i) {
    stats.note_written(ObjectId::V, i, s.v[i]);
    stats.note_written(ObjectId::VTS, i, s.vts[i]);
    stats.note_written(ObjectId::ViewSum, i, s.viewsum[i]);
    stats.note_written(ObjectId::Flags, i, s.flags[i]);
  }
}

}  // namespace detail

/// Deterministic single-context backend.
class SimMemory {
 public:
  struct Options {
    bool record_trace = true;
    bool track_distinct = true;
    std::size_t distinct_cap = kDefaultDistinctCap;
  };

  SimMemory(std::size_t n, const FFunction& f, Value x0)
      : SimMemory(n, f, x0, Options{}) {}

  SimMemory(std::size_t n, const FFunction& f, Value x0, Options opts)
      : n_(n),
        opts_(opts),
        state_(SharedState::initial(n, f, x0)),
        stats_(n, opts.distinct_cap) {
    if (n == 0) throw UsageError("process count must be at least 1");
    stats_.set_distinct_tracking(opts.track_distinct);
    detail::register_initial_values(stats_, state_);
  }

  std::size_t process_count() const noexcept { return n_; }

  template <class Tag>
  void update(const AccessContext& ctx, const typename Tag::value_type& value) {
    detail::check_pid(ctx.pid, n_);
    state_.segments<Tag>()[ctx.pid] = value;
    stats_.record(ctx, Tag::id, AccessKind::update);
    stats_.note_written(Tag::id, ctx.pid, value);
    emit(ctx, Tag::id, AccessKind::update, [&] { return TraceValue{value}; });
  }

  template <class Tag>
  std::vector<typename Tag::value_type> scan(const AccessContext& ctx) {
    detail::check_pid(ctx.pid, n_);
    auto view = state_.segments<Tag>();
    stats_.record(ctx, Tag::id, AccessKind::scan);
    emit(ctx, Tag::id, AccessKind::scan, [&] { return TraceValue{view}; });
    return view;
  }

  /// Streaming consumer for every event, called even when the trace
  /// itself is not retained.
  using Observer = std::function<void(const TraceEvent&, const AccessStats&)>;

  void set_observer(Observer observer) {
    observer_ = std::move(observer);
  }

  std::uint64_t steps() const noexcept { return step_; }
  const std::vector<TraceEvent>& trace() const noexcept { return trace_; }
  std::vector<TraceEvent> take_trace() { return std::move(trace_); }
  const AccessStats& stats() const noexcept { return stats_; }
  AccessStats take_stats() { return std::move(stats_); }
  const SharedState& state() const noexcept { return state_; }

 private:
  template <class MakeValue>
  void emit(const AccessContext& ctx, ObjectId obj, AccessKind kind,
            MakeValue&& make_value) {
    const auto step = step_++;
    if (!opts_.record_trace && !observer_) return;
    TraceEvent ev{step, ctx.pid, obj, kind, make_value(), ctx.hl_op};
    if (observer_) observer_(ev, stats_);
    if (opts_.record_trace) trace_.push_back(std::move(ev));
  }

  std::size_t n_;
  Options opts_;
  SharedState state_;
  AccessStats stats_;
  std::uint64_t step_ = 0;
  std::vector<TraceEvent> trace_;
  Observer observer_;
};

/// Backend for real concurrent agents. One mutex per object makes each
/// update/scan a short critical section, hence linearizable. Not wait-free.
class NativeMemory {
 public:
  NativeMemory(std::size_t n, const FFunction& f, Value x0,
               std::size_t distinct_cap = kDefaultDistinctCap)
      : n_(n), state_(SharedState::initial(n, f, x0)), stats_(n, distinct_cap) {
    if (n == 0) throw UsageError("process count must be at least 1");
    detail::register_initial_values(stats_, state_);
  }

  std::size_t process_count() const noexcept { return n_; }

  template <class Tag>
  void update(const AccessContext& ctx, const typename Tag::value_type& value) {
    detail::check_pid(ctx.pid, n_);
    {
      std::lock_guard lock(object_mutex_[static_cast<std::size_t>(Tag::id)]);
      state_.segments<Tag>()[ctx.pid] = value;
    }
    std::lock_guard lock(stats_mutex_);
    stats_.record(ctx, Tag::id, AccessKind::update);
    stats_.note_written(Tag::id, ctx.pid, value);
  }

  template <class Tag>
  std::vector<typename Tag::value_type> scan(const AccessContext& ctx) {
    detail::check_pid(ctx.pid, n_);
    std::vector<typename Tag::value_type> view;
    {
      std::lock_guard lock(object_mutex_[static_cast<std::size_t>(Tag::id)]);
      view = state_.segments<Tag>();
    }
    std::lock_guard lock(stats_mutex_);
    stats_.record(ctx, Tag::id, AccessKind::scan);
    return view;
  }

  /// Only meaningful once all agents have joined.
  const AccessStats& stats() const noexcept { return stats_; }

 private:
  std::size_t n_;
  SharedState state_;
  AccessStats stats_;
  std::array<std::mutex, 4> object_mutex_;
  std::mutex stats_mutex_;
};

/// A single generic snapshot object for concurrent agents, with an
/// invoke/respond log of its raw operations. Used to check that the
/// native snapshot discipline is itself linearizable.
template <class T>
class NativeSnapshot {
 public:
  struct LogEntry {
    bool invoke = true;
    Pid pid = 0;
    bool is_scan = false;
    T written{};
    std::vector<T> view;
    std::uint64_t op_id = 0;
  };

  NativeSnapshot(std::size_t n, T initial) : segments_(n, initial) {}

  void update(Pid pid, const T& value, std::uint64_t op_id) {
    detail::check_pid(pid, segments_.size());
    log({true, pid, false, value, {}, op_id});
    {
      std::lock_guard lock(mutex_);
      segments_[pid] = value;
    }
    log({false, pid, false, value, {}, op_id});
  }

  std::vector<T> scan(Pid pid, std::uint64_t op_id) {
    detail::check_pid(pid, segments_.size());
    log({true, pid, true, T{}, {}, op_id});
    std::vector<T> view;
    {
      std::lock_guard lock(mutex_);
      view = segments_;
    }
    log({false, pid, true, T{}, view, op_id});
    return view;
  }

  std::vector<LogEntry> take_log() {
    std::lock_guard lock(log_mutex_);
    return std::move(log_);
  }

 private:
  void log(LogEntry e) {
    std::lock_guard lock(log_mutex_);
    log_.push_back(std::move(e));
  }

  std::vector<T> segments_;
  std::mutex mutex_;
  std::mutex log_mutex_;
  std::vector<LogEntry> log_;
};

}  // namespace fsnap
