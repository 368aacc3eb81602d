#pragma once

// Linearizability checking of F-snapshot histories.
//
// The search follows Wing & Gong: repeatedly pick a minimal pending
// operation (one whose invocation precedes every unlinearized response),
// apply it to the abstract state and recurse. Failed (linearized set,
// abstract state) pairs are memoized; for this object the abstract state
// is just the n-slot value vector, so the memo is small.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "fsnap/error.hpp"
#include "fsnap/function.hpp"
#include "fsnap/oracle.hpp"
#include "fsnap/shmem.hpp"

namespace fsnap {

enum class EventKind : std::uint8_t { invoke, respond };

struct HistoryEvent {
  EventKind kind = EventKind::invoke;
  Pid pid = 0;
  OpKind op = OpKind::update;
  Value arg = 0;               // update invocations
  std::optional<Answer> ret;   // fscan responses
  std::uint64_t hl_op = 0;

  friend bool operator==(const HistoryEvent&, const HistoryEvent&) = default;
};

struct History {
  std::vector<HistoryEvent> events;

  void invoke(Pid pid, OpKind op, std::uint64_t hl_op, Value arg = 0) {
    events.push_back({EventKind::invoke, pid, op, arg, std::nullopt, hl_op});
  }
  void respond(Pid pid, OpKind op, std::uint64_t hl_op,
               std::optional<Answer> ret = std::nullopt) {
    events.push_back({EventKind::respond, pid, op, 0, std::move(ret), hl_op});
  }

  friend bool operator==(const History&, const History&) = default;
};

/// A complete high-level operation with its position in the history.
struct Operation {
  std::uint64_t hl_op = 0;
  Pid pid = 0;
  OpKind op = OpKind::update;
  Value arg = 0;
  Answer ret;
  std::size_t invoked = 0;
  std::size_t responded = 0;
};

namespace detail {

struct ParsedHistory {
  std::vector<Operation> ops;
  std::vector<std::uint64_t> pending;
};

inline ParsedHistory parse_history(const History& h, std::size_t n) {
  ParsedHistory out;
  std::map<std::uint64_t, std::size_t> by_id;
  std::vector<std::optional<std::size_t>> open(n);
  for (std::size_t pos = 0; pos < h.events.size(); ++pos) {
    const auto& e = h.events[pos];
    const auto where = " at event " + std::to_string(pos);
    if (e.pid >= n) throw MalformedHistory("pid out of range" + where);
    if (e.kind == EventKind::invoke) {
      if (open[e.pid])
        throw MalformedHistory("pid " + std::to_string(e.pid) +
                               " invokes while an operation is open" + where);
      if (by_id.contains(e.hl_op))
        throw MalformedHistory("duplicate hl_op " + std::to_string(e.hl_op) + where);
      by_id[e.hl_op] = out.ops.size();
      open[e.pid] = out.ops.size();
      out.ops.push_back(Operation{e.hl_op, e.pid, e.op, e.arg, Answer{}, pos, 0});
    } else {
      if (!open[e.pid])
        throw MalformedHistory("respond without invoke" + where);
      auto& op = out.ops[*open[e.pid]];
      if (op.hl_op != e.hl_op || op.op != e.op)
        throw MalformedHistory("respond does not match the open invoke" + where);
      if (op.op == OpKind::fscan) {
        if (!e.ret) throw MalformedHistory("fscan response without value" + where);
        op.ret = *e.ret;
      }
      op.responded = pos;
      open[e.pid].reset();
    }
  }
  for (const auto& o : open)
    if (o) out.pending.push_back(out.ops[*o].hl_op);
  return out;
}

}  // namespace detail

/// Validates that every invoked operation has responded. The harness
/// drives pending operations to completion before checking; dropping them
/// would be unsound for updates that already took effect.
inline History complete_pending(const History& h, std::size_t n) {
  const auto parsed = detail::parse_history(h, n);
  if (!parsed.pending.empty()) {
    std::string ids;
    for (auto id : parsed.pending) ids += (ids.empty() ? "" : ",") + std::to_string(id);
    throw PendingOperations("history has pending operations: " + ids);
  }
  return h;
}

/// Complete operations of a well-formed history, in invocation order.
inline std::vector<Operation> operations(const History& h, std::size_t n) {
  complete_pending(h, n);
  return detail::parse_history(h, n).ops;
}

struct Witness {
  std::vector<std::uint64_t> order;  // hl_op ids
};

struct CheckResult {
  bool linearizable = false;
  Witness witness;
  /// Longest linearizable prefix found (the witness itself on success).
  std::vector<std::uint64_t> longest_prefix;
  std::uint64_t states_explored = 0;
};

namespace detail {

class LinearizabilitySearch {
 public:
  LinearizabilitySearch(std::vector<Operation> ops, OracleState initial)
      : ops_(std::move(ops)),
        done_(ops_.size(), false),
        state_(std::move(initial)) {}

  CheckResult run() {
    CheckResult result;
    result.linearizable = search();
    result.states_explored = states_;
    if (result.linearizable) {
      for (auto idx : order_) result.witness.order.push_back(ops_[idx].hl_op);
      result.longest_prefix = result.witness.order;
    } else {
      for (auto idx : best_) result.longest_prefix.push_back(ops_[idx].hl_op);
    }
    return result;
  }

 private:
  bool search() {
    ++states_;
    if (order_.size() > best_.size()) best_ = order_;
    if (order_.size() == ops_.size()) return true;

    const auto key = memo_key();
    if (failed_.contains(key)) return false;

    std::size_t min_resp = SIZE_MAX;
    for (std::size_t k = 0; k < ops_.size(); ++k)
      if (!done_[k]) min_resp = std::min(min_resp, ops_[k].responded);

    std::vector<std::size_t> candidates;
    for (std::size_t k = 0; k < ops_.size(); ++k)
      if (!done_[k] && ops_[k].invoked < min_resp) candidates.push_back(k);

    // A minimal fscan consistent with the current state can be placed
    // right away: it leaves the state unchanged and everything that must
    // precede it is already linearized.
    for (auto k : candidates) {
      if (ops_[k].op == OpKind::fscan && state_.fscan() == ops_[k].ret) {
        if (take(k)) return true;
        failed_.insert(key);
        return false;
      }
    }

    for (auto k : candidates) {
      if (ops_[k].op == OpKind::fscan) continue;  // mismatching fscan: prune
      if (take(k)) return true;
    }
    failed_.insert(key);
    return false;
  }

  bool take(std::size_t k) {
    const auto& op = ops_[k];
    const auto saved = state_.slots()[op.pid];
    if (op.op == OpKind::update) state_.update(op.pid, op.arg);
    done_[k] = true;
    order_.push_back(k);
    const bool ok = search();
    if (ok) return true;
    order_.pop_back();
    done_[k] = false;
    if (op.op == OpKind::update) state_.update(op.pid, saved);
    return false;
  }

  std::string memo_key() const {
    std::string key;
    key.reserve(ops_.size() / 8 + 8 * state_.slots().size() + 1);
    unsigned char byte = 0;
    for (std::size_t k = 0; k < ops_.size(); ++k) {
      if (done_[k]) byte |= static_cast<unsigned char>(1u << (k % 8));
      if (k % 8 == 7) {
        key.push_back(static_cast<char>(byte));
        byte = 0;
      }
    }
    key.push_back(static_cast<char>(byte));
    for (auto v : state_.slots()) encoding::put_u64(key, v);
    return key;
  }

  std::vector<Operation> ops_;
  std::vector<bool> done_;
  OracleState state_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> best_;
  std::unordered_set<std::string> failed_;
  std::uint64_t states_ = 0;
};

}  // namespace detail

/// Decides whether `h` is linearizable with respect to the F-snapshot
/// sequential specification. Throws MalformedHistory / PendingOperations.
inline CheckResult check(const History& h, const FFunction& f, std::size_t n,
                         Value x0) {
  auto ops = operations(h, n);
  return detail::LinearizabilitySearch(std::move(ops), OracleState(f, n, x0)).run();
}

/// Independent re-verification of a witness: it must be a permutation of
/// the history's operations, respect real-time precedence, and reproduce
/// every fscan result by replay. Returns an error description, or nullopt.
inline std::optional<std::string> validate_witness(const History& h,
                                                   const Witness& w,
                                                   const FFunction& f,
                                                   std::size_t n, Value x0) {
  const auto ops = operations(h, n);
  if (w.order.size() != ops.size()) return "witness length differs from history";
  std::map<std::uint64_t, const Operation*> by_id;
  for (const auto& op : ops) by_id[op.hl_op] = &op;
  std::vector<const Operation*> seq;
  std::unordered_set<std::uint64_t> seen;
  for (auto id : w.order) {
    auto it = by_id.find(id);
    if (it == by_id.end()) return "witness names unknown op " + std::to_string(id);
    if (!seen.insert(id).second) return "witness repeats op " + std::to_string(id);
    seq.push_back(it->second);
  }
  for (std::size_t a = 0; a < seq.size(); ++a)
    for (std::size_t b = a + 1; b < seq.size(); ++b)
      if (seq[b]->responded < seq[a]->invoked)
        return "op " + std::to_string(seq[b]->hl_op) + " precedes op " +
               std::to_string(seq[a]->hl_op) + " in real time";
  OracleState oracle(f, n, x0);
  for (const auto* op : seq) {
    if (op->op == OpKind::update) {
      oracle.update(op->pid, op->arg);
    } else if (oracle.fscan() != op->ret) {
      return "fscan " + std::to_string(op->hl_op) + " mismatches replay";
    }
  }
  return std::nullopt;
}

}  // namespace fsnap
