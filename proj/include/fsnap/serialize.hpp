#pragma once

// JSON forms of traces, histories and reports.
//
// Trace and history files are JSON lines. A trace file starts with one
// {"meta": {...}} line carrying the run configuration and programs, then
// one TraceEvent per line:
//   {"step":0,"pid":1,"object":"V","kind":"update","value":[1,5],"hl_op":2}
// Values: V entries as [counter, val], timestamps as 3*cycle+index,
// timestamp pairs as [old, new], ViewSum entries as 3-arrays with null,
// flags as {"color","vts","winners","losers","ans"}.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fsnap/checker.hpp"
#include "fsnap/harness.hpp"
#include "fsnap/shmem.hpp"
#include "fsnap/types.hpp"

namespace fsnap {

using nlohmann::json;

inline void to_json(json& j, const Timestamp& t) { j = t.code(); }
inline void from_json(const json& j, Timestamp& t) {
  const int c = j.get<int>();
  if (c < 0 || c >= kTimestampCount) throw json::other_error::create(501, "bad timestamp", &j);
  t = Timestamp::from_code(c);
}

inline void to_json(json& j, const TimestampPair& p) { j = json::array({p.old_ts, p.new_ts}); }
inline void from_json(const json& j, TimestampPair& p) {
  p.old_ts = j.at(0).get<Timestamp>();
  p.new_ts = j.at(1).get<Timestamp>();
}

inline void to_json(json& j, const VEntry& e) { j = json::array({e.counter, e.val}); }
inline void from_json(const json& j, VEntry& e) {
  e.counter = j.at(0).get<std::uint64_t>();
  e.val = j.at(1).get<Value>();
}

inline json view_triple_to_json(const ViewTriple& t) {
  json j = json::array();
  for (const auto& s : t) j.push_back(s ? json(*s) : json(nullptr));
  return j;
}
inline ViewTriple view_triple_from_json(const json& j) {
  ViewTriple t;
  for (std::size_t c = 0; c < 3; ++c) {
    const auto& s = j.at(c);
    if (s.is_null()) t[c] = std::nullopt;
    else t[c] = s.get<std::uint64_t>();
  }
  return t;
}

inline json pair_set_to_json(const PairSet& s) {
  json j = json::array();
  for (const auto& [pid, c] : s.members()) j.push_back(json::array({pid, c}));
  return j;
}
inline PairSet pair_set_from_json(const json& j, std::size_t n) {
  PairSet s(n);
  for (const auto& m : j) s.insert(m.at(0).get<Pid>(), m.at(1).get<Color>());
  return s;
}

inline json answer_to_json(const Answer& a) {
  if (const auto* s = std::get_if<std::uint64_t>(&a)) return *s;
  return std::get<std::vector<Value>>(a);
}
inline Answer answer_from_json(const json& j) {
  if (j.is_array()) return j.get<std::vector<Value>>();
  return j.get<std::uint64_t>();
}

inline json flag_to_json(const Flag& f) {
  return json{{"color", f.color},
              {"vts", f.vts},
              {"winners", pair_set_to_json(f.winners)},
              {"losers", pair_set_to_json(f.losers)},
              {"ans", answer_to_json(f.ans)}};
}
inline Flag flag_from_json(const json& j) {
  Flag f;
  f.color = j.at("color").get<Color>();
  f.vts = j.at("vts").get<VtsRow>();
  const auto n = f.vts.size();
  f.winners = pair_set_from_json(j.at("winners"), n);
  f.losers = pair_set_from_json(j.at("losers"), n);
  f.ans = answer_from_json(j.at("ans"));
  return f;
}

inline ObjectId object_from_string(const std::string& s) {
  for (auto o : kAllObjects)
    if (s == to_string(o)) return o;
  throw Error("unknown object '" + s + "'");
}
inline AccessKind access_from_string(const std::string& s) {
  if (s == "update") return AccessKind::update;
  if (s == "scan") return AccessKind::scan;
  throw Error("unknown access kind '" + s + "'");
}
inline OpKind op_from_string(const std::string& s) {
  if (s == "update") return OpKind::update;
  if (s == "fscan") return OpKind::fscan;
  throw Error("unknown op '" + s + "'");
}

inline json trace_value_to_json(const TraceValue& v) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ViewTriple>) return view_triple_to_json(x);
        else if constexpr (std::is_same_v<T, Flag>) return flag_to_json(x);
        else if constexpr (std::is_same_v<T, std::vector<ViewTriple>>) {
          json j = json::array();
          for (const auto& t : x) j.push_back(view_triple_to_json(t));
          return j;
        } else if constexpr (std::is_same_v<T, std::vector<Flag>>) {
          json j = json::array();
          for (const auto& f : x) j.push_back(flag_to_json(f));
          return j;
        } else {
          return json(x);
        }
      },
      v);
}

inline TraceValue trace_value_from_json(const json& j, ObjectId obj, AccessKind kind) {
  const bool scan = kind == AccessKind::scan;
  switch (obj) {
    case ObjectId::V:
      if (scan) return j.get<std::vector<VEntry>>();
      return j.get<VEntry>();
    case ObjectId::VTS:
      if (scan) return j.get<std::vector<VtsRow>>();
      return j.get<VtsRow>();
    case ObjectId::ViewSum:
      if (scan) {
        std::vector<ViewTriple> out;
        for (const auto& t : j) out.push_back(view_triple_from_json(t));
        return out;
      }
      return view_triple_from_json(j);
    case ObjectId::Flags:
      if (scan) {
        std::vector<Flag> out;
        for (const auto& f : j) out.push_back(flag_from_json(f));
        return out;
      }
      return flag_from_json(j);
  }
  throw Error("bad object");
}

inline json event_to_json(const TraceEvent& e) {
  return json{{"step", e.step},         {"pid", e.pid},
              {"object", to_string(e.object)}, {"kind", to_string(e.kind)},
              {"value", trace_value_to_json(e.value)}, {"hl_op", e.hl_op}};
}

inline TraceEvent event_from_json(const json& j) {
  TraceEvent e;
  e.step = j.at("step").get<std::uint64_t>();
  e.pid = j.at("pid").get<Pid>();
  e.object = object_from_string(j.at("object").get<std::string>());
  e.kind = access_from_string(j.at("kind").get<std::string>());
  e.value = trace_value_from_json(j.at("value"), e.object, e.kind);
  e.hl_op = j.at("hl_op").get<std::uint64_t>();
  return e;
}

inline json history_event_to_json(const HistoryEvent& e) {
  json j{{"kind", e.kind == EventKind::invoke ? "invoke" : "respond"},
         {"pid", e.pid},
         {"op", to_string(e.op)},
         {"hl_op", e.hl_op}};
  if (e.kind == EventKind::invoke && e.op == OpKind::update) j["arg"] = e.arg;
  if (e.ret) j["ret"] = answer_to_json(*e.ret);
  return j;
}

inline HistoryEvent history_event_from_json(const json& j) {
  HistoryEvent e;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "invoke") e.kind = EventKind::invoke;
  else if (kind == "respond") e.kind = EventKind::respond;
  else throw MalformedHistory("unknown event kind '" + kind + "'");
  e.pid = j.at("pid").get<Pid>();
  e.op = op_from_string(j.at("op").get<std::string>());
  e.hl_op = j.at("hl_op").get<std::uint64_t>();
  if (j.contains("arg")) e.arg = j.at("arg").get<Value>();
  if (j.contains("ret")) e.ret = answer_from_json(j.at("ret"));
  return e;
}

inline json programs_to_json(const Programs& programs) {
  json out = json::array();
  for (const auto& p : programs) {
    json ops = json::array();
    for (const auto& op : p.ops) {
      json o{{"op", to_string(op.kind)}, {"hl_op", op.hl_op}};
      if (op.kind == OpKind::update) o["arg"] = op.arg;
      ops.push_back(std::move(o));
    }
    out.push_back(std::move(ops));
  }
  return out;
}

inline Programs programs_from_json(const json& j) {
  Programs out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    ProcessProgram p;
    p.pid = i;
    for (const auto& o : j[i]) {
      ProgramOp op;
      op.kind = op_from_string(o.at("op").get<std::string>());
      op.hl_op = o.at("hl_op").get<std::uint64_t>();
      if (op.kind == OpKind::update) op.arg = o.at("arg").get<Value>();
      p.ops.push_back(op);
    }
    out.push_back(std::move(p));
  }
  return out;
}

inline json meta_to_json(const TraceMeta& m) {
  return json{{"format", "fsnap-trace/1"},
              {"n", m.n},
              {"function", m.function},
              {"x0", m.x0},
              {"mutation", to_string(m.mutation)},
              {"programs", programs_to_json(m.programs)}};
}

inline TraceMeta meta_from_json(const json& j) {
  TraceMeta m;
  m.n = j.at("n").get<std::size_t>();
  m.function = j.at("function").get<std::string>();
  m.x0 = j.at("x0").get<Value>();
  m.mutation = parse_mutation(j.value("mutation", "none"));
  m.programs = programs_from_json(j.at("programs"));
  return m;
}

// ---------------------------------------------------------------------------
// Files

/// Writes to a sibling temporary and renames it into place.
inline void write_file_atomically(const std::filesystem::path& path,
                                  const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string trace_to_jsonl(const TraceMeta& meta,
                                  const std::vector<TraceEvent>& trace) {
  std::ostringstream out;
  out << json{{"meta", meta_to_json(meta)}}.dump() << '\n';
  for (const auto& e : trace) out << event_to_json(e).dump() << '\n';
  return out.str();
}

struct TraceFile {
  TraceMeta meta;
  std::vector<TraceEvent> events;
};

inline TraceFile parse_trace_jsonl(std::istream& in) {
  TraceFile tf;
  std::string line;
  bool have_meta = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = json::parse(line);
      if (j.contains("meta")) {
        tf.meta = meta_from_json(j.at("meta"));
        have_meta = true;
      } else {
        tf.events.push_back(event_from_json(j));
      }
    } catch (const json::exception& e) {
      throw Error("trace line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_meta) throw Error("trace has no meta line");
  return tf;
}

inline TraceFile read_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace " + path.string());
  return parse_trace_jsonl(in);
}

inline std::string history_to_jsonl(const History& h) {
  std::string out;
  for (const auto& e : h.events) {
    out += history_event_to_json(e).dump();
    out += '\n';
  }
  return out;
}

inline History history_from_jsonl(std::istream& in) {
  History h;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      h.events.push_back(history_event_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw MalformedHistory(std::string("history line: ") + e.what());
    }
  }
  return h;
}

// ---------------------------------------------------------------------------
// Reports

inline json findings_to_json(const std::vector<Finding>& fs) {
  json out = json::array();
  for (const auto& f : fs)
    out.push_back(json{{"monitor", f.monitor}, {"step", f.step},
                       {"hl_op", f.hl_op}, {"detail", f.detail}});
  return out;
}

inline json failure_to_json(const RunFailure& f) {
  json j{{"index", f.index},
         {"schedule", f.schedule},
         {"findings", findings_to_json(f.findings)},
         {"longest_linearizable_prefix", f.longest_prefix}};
  if (f.seed) j["seed"] = *f.seed;
  return j;
}

inline json exploration_to_json(const ExplorationReport& r) {
  json fails = json::array();
  for (const auto& f : r.failures) fails.push_back(failure_to_json(f));
  return json{{"schedules", r.schedules},
              {"steps_per_schedule", r.total_steps},
              {"duplicate_schedules", r.duplicate_schedules},
              {"budget_exceeded", r.budget_exceeded},
              {"failed_schedules", r.failed_schedules},
              {"failures", fails},
              {"monitor_counts", r.counts},
              {"ok", r.ok()}};
}

inline json fuzz_to_json(const FuzzReport& r) {
  json fails = json::array();
  for (const auto& f : r.failures) fails.push_back(failure_to_json(f));
  return json{{"runs", r.runs},
              {"failed_runs", r.failed_runs},
              {"failures", fails},
              {"failures_by_monitor", r.failures_by_monitor},
              {"monitor_counts", r.counts},
              {"run_seeds", r.run_seeds},
              {"ok", r.ok()}};
}

inline json oracle_diff_to_json(const OracleDiffReport& r) {
  return json{{"schedules", r.schedules},
              {"fscans_compared", r.fscans_compared},
              {"mismatches", r.mismatches},
              {"details", r.details},
              {"ok", r.ok()}};
}

inline json bound_to_json(const BoundReport& r) {
  json curve = json::array();
  for (const auto& s : r.curve)
    curve.push_back(json::array({s.updates, s.flags_distinct, s.v_distinct}));
  return json{{"updates", r.updates},
              {"fscans", r.fscans},
              {"bound_per_segment", r.bound_per_segment},
              {"flags_distinct_per_segment", r.flags_distinct_per_segment},
              {"flags_distinct_at_half", r.flags_distinct_at_half},
              {"flags_distinct_final", r.flags_distinct_final},
              {"v_distinct_at_half", r.v_distinct_at_half},
              {"v_distinct_final", r.v_distinct_final},
              {"last_new_flags_value_at_update", r.last_new_flags_value_at},
              {"within_bound", r.within_bound()},
              {"plateaued", r.plateaued()},
              {"v_grows", r.v_grows()},
              {"monitor_findings", r.monitor_findings},
              {"findings", findings_to_json(r.findings)},
              {"monitor_counts", r.counts},
              {"curve_columns", json::array({"updates", "flags_distinct", "v_distinct"})},
              {"curve", curve}};
}

inline std::string bound_curve_csv(const BoundReport& r) {
  std::string out = "updates,flags_distinct,v_distinct\n";
  for (const auto& s : r.curve)
    out += std::to_string(s.updates) + "," + std::to_string(s.flags_distinct) + "," +
           std::to_string(s.v_distinct) + "\n";
  return out;
}

}  // namespace fsnap
