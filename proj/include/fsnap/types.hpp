#pragma once

// Register contents of the four snapshot objects (V, VTS, ViewSum, Flags)
// and their initial values.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fsnap/function.hpp"
#include "fsnap/timestamp.hpp"

namespace fsnap {

using Color = std::uint8_t;  // 0, 1 or 2

inline constexpr Timestamp kInitialTimestamp{0, 0};

/// V[i]: (number of updates begun by p_i, last value written).
struct VEntry {
  std::uint64_t counter = 0;
  Value val = 0;

  friend bool operator==(const VEntry&, const VEntry&) = default;
};

/// ViewSum[i]: one view sum per color; null marks a cleared slot.
using ViewTriple = std::array<std::optional<std::uint64_t>, 3>;

inline constexpr ViewTriple initial_view_triple() {
  return ViewTriple{std::optional<std::uint64_t>{0}, std::nullopt, std::nullopt};
}

/// VTS[i]: p_i's timestamp pair against each process.
using VtsRow = std::vector<TimestampPair>;

inline VtsRow initial_vts_row(std::size_t n) {
  return VtsRow(n, TimestampPair{kInitialTimestamp, kInitialTimestamp});
}

/// Set of (pid, color) pairs, stored as a 3n-bit membership vector.
class PairSet {
 public:
  PairSet() = default;
  explicit PairSet(std::size_t n) : bits_(3 * n, false) {}

  std::size_t process_count() const noexcept { return bits_.size() / 3; }

  bool contains(Pid pid, Color color) const {
    const auto k = 3 * pid + color;
    return k < bits_.size() && bits_[k];
  }
  void insert(Pid pid, Color color) { bits_.at(3 * pid + color) = true; }
  void clear() { std::fill(bits_.begin(), bits_.end(), false); }

  bool intersects(const PairSet& other) const {
    const auto m = std::min(bits_.size(), other.bits_.size());
    for (std::size_t k = 0; k < m; ++k)
      if (bits_[k] && other.bits_[k]) return true;
    return false;
  }

  /// Members in (pid, color) order.
  std::vector<std::pair<Pid, Color>> members() const {
    std::vector<std::pair<Pid, Color>> out;
    for (std::size_t k = 0; k < bits_.size(); ++k)
      if (bits_[k]) out.emplace_back(k / 3, static_cast<Color>(k % 3));
    return out;
  }

  std::size_t size() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
  }

  friend bool operator==(const PairSet&, const PairSet&) = default;

 private:
  std::vector<bool> bits_;
};

/// Flags[i]: the bounded record Fscan reads.
struct Flag {
  Color color = 0;
  VtsRow vts;
  PairSet winners;
  PairSet losers;
  Answer ans;

  friend bool operator==(const Flag&, const Flag&) = default;
};

/// Initial Flags[i]: winners {(j,0): i<j}, losers {(j,0): j<i},
/// ans = F(x0, ..., x0).
inline Flag initial_flag(Pid i, std::size_t n, const Answer& initial_ans) {
  Flag f;
  f.color = 0;
  f.vts = initial_vts_row(n);
  f.winners = PairSet(n);
  f.losers = PairSet(n);
  for (Pid j = 0; j < n; ++j) {
    if (i < j) f.winners.insert(j, 0);
    if (j < i) f.losers.insert(j, 0);
  }
  f.ans = initial_ans;
  return f;
}

inline Answer initial_answer(const FFunction& f, std::size_t n, Value x0) {
  const std::vector<Value> xs(n, x0);
  return f(xs);
}

// Compact canonical byte encodings, used as keys for distinct-value
// tracking. Equal values encode equally and vice versa within one type.
namespace encoding {

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int s = 0; s < 64; s += 8) out.push_back(static_cast<char>((v >> s) & 0xff));
}

inline void put(std::string& out, const VEntry& e) {
  put_u64(out, e.counter);
  put_u64(out, e.val);
}

inline void put(std::string& out, const ViewTriple& t) {
  for (const auto& slot : t) {
    out.push_back(slot ? 1 : 0);
    if (slot) put_u64(out, *slot);
  }
}

inline void put(std::string& out, const VtsRow& row) {
  put_u64(out, row.size());
  for (const auto& p : row) {
    out.push_back(static_cast<char>(p.old_ts.code()));
    out.push_back(static_cast<char>(p.new_ts.code()));
  }
}

inline void put(std::string& out, const PairSet& s) {
  const auto m = s.members();
  put_u64(out, m.size());
  for (const auto& [pid, c] : m) {
    put_u64(out, pid);
    out.push_back(static_cast<char>(c));
  }
}

inline void put(std::string& out, const Answer& a) {
  if (const auto* scalar = std::get_if<std::uint64_t>(&a)) {
    out.push_back(0);
    put_u64(out, *scalar);
  } else {
    const auto& vec = std::get<std::vector<Value>>(a);
    out.push_back(1);
    put_u64(out, vec.size());
    for (auto v : vec) put_u64(out, v);
  }
}

inline void put(std::string& out, const Flag& f) {
  out.push_back(static_cast<char>(f.color));
  put(out, f.vts);
  put(out, f.winners);
  put(out, f.losers);
  put(out, f.ans);
}

template <class T>
std::string encode(const T& value) {
  std::string out;
  put(out, value);
  return out;
}

}  // namespace encoding

}  // namespace fsnap
