#pragma once

// Nine-vertex bounded timestamp system.
//
// Vertices are (cycle, index) with cycle, index in {0,1,2}. A vertex v
// dominates u when they sit on the same cycle and v is u's successor, or
// when v's cycle is the successor of u's cycle. There are no 2-cycles, and
// every pair of vertices has a common dominator, which is all the update
// procedure needs to order two processes that disagree.

#include <array>
#include <compare>
#include <cstdint>

namespace fsnap {

struct Timestamp {
  std::uint8_t cycle = 0;
  std::uint8_t index = 0;

  /// Trace encoding: 3 * cycle + index, in [0, 9).
  constexpr int code() const noexcept { return 3 * cycle + index; }

  static constexpr Timestamp from_code(int code) noexcept {
    return Timestamp{static_cast<std::uint8_t>(code / 3),
                     static_cast<std::uint8_t>(code % 3)};
  }

  friend constexpr bool operator==(Timestamp, Timestamp) = default;
  friend constexpr auto operator<=>(Timestamp, Timestamp) = default;
};

inline constexpr int kTimestampCount = 9;

/// True iff v dominates u (the edge (v, u) exists, i.e. u <_ts v).
constexpr bool dominates(Timestamp v, Timestamp u) noexcept {
  if (v.cycle == u.cycle && v.index == (u.index + 1) % 3) return true;
  return v.cycle == (u.cycle + 1) % 3;
}

namespace detail {

constexpr std::array<Timestamp, kTimestampCount * kTimestampCount>
build_next_table() {
  std::array<Timestamp, kTimestampCount * kTimestampCount> table{};
  for (int a = 0; a < kTimestampCount; ++a) {
    for (int b = 0; b < kTimestampCount; ++b) {
      // First dominator of both in (cycle, index) lexicographic order.
      for (int w = 0; w < kTimestampCount; ++w) {
        const auto cand = Timestamp::from_code(w);
        if (dominates(cand, Timestamp::from_code(a)) &&
            dominates(cand, Timestamp::from_code(b))) {
          table[a * kTimestampCount + b] = cand;
          break;
        }
      }
    }
  }
  return table;
}

inline constexpr auto kNextTable = build_next_table();

constexpr bool next_table_is_sound() {
  for (int a = 0; a < kTimestampCount; ++a) {
    for (int b = 0; b < kTimestampCount; ++b) {
      const auto w = kNextTable[a * kTimestampCount + b];
      if (!dominates(w, Timestamp::from_code(a)) ||
          !dominates(w, Timestamp::from_code(b)))
        return false;
    }
  }
  return true;
}

static_assert(next_table_is_sound(),
              "next() must dominate both of its arguments");

}  // namespace detail

/// A timestamp dominating both v and u.
constexpr Timestamp next(Timestamp v, Timestamp u) noexcept {
  return detail::kNextTable[v.code() * kTimestampCount + u.code()];
}

struct TimestampPair {
  Timestamp old_ts;
  Timestamp new_ts;

  friend constexpr bool operator==(const TimestampPair&,
                                   const TimestampPair&) = default;
};

/// Pair update: `read` is what the caller saw at VTS[j][i], `mine` is its
/// current vts_i[j]. The result keeps the caller's previous new timestamp
/// as old and takes a fresh new timestamp dominating both fields of `read`.
constexpr TimestampPair newts(TimestampPair read, TimestampPair mine) noexcept {
  return TimestampPair{mine.new_ts, next(read.old_ts, read.new_ts)};
}

}  // namespace fsnap
