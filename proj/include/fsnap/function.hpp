#pragma once

// The function F evaluated by Fscan, and the value types around it.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fsnap/error.hpp"

namespace fsnap {

using Pid = std::size_t;

/// Data values written by update. Desk-scale runs never get close to 2^64;
/// counters are overflow-checked where they grow.
using Value = std::uint64_t;

/// Result of F: a scalar for finite-range functions, a vector for identity.
using Answer = std::variant<std::uint64_t, std::vector<Value>>;

struct FFunction {
  std::string name;  // canonical spec, e.g. "sum-mod:5"
  std::size_t arity = 0;
  std::function<Answer(std::span<const Value>)> eval;
  bool finite_range = false;
  std::uint64_t range_size = 0;  // |D| when finite_range

  Answer operator()(std::span<const Value> vals) const { return eval(vals); }
};

namespace detail {

inline std::uint64_t parse_u64(std::string_view text, std::string_view what) {
  std::uint64_t out = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw UsageError("invalid " + std::string(what) + ": '" +
                     std::string(text) + "'");
  return out;
}

}  // namespace detail

/// Builds one of the built-in functions from "name[:param]":
///   sum-mod:k  sum of values mod k, D = Z_k
///   max-pid    pid holding the lexicographically largest (value, pid)
///   all-equal  1 if every segment holds the same value, else 0
///   identity   the whole vector (plain snapshot; infinite range)
inline FFunction make_function(std::string_view spec, std::size_t n) {
  if (n == 0) throw UsageError("function arity must be at least 1");
  const auto colon = spec.find(':');
  const auto name = spec.substr(0, colon);
  const auto param =
      colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  const bool has_param = colon != std::string_view::npos;

  FFunction f;
  f.arity = n;
  if (name == "sum-mod") {
    if (!has_param) throw UsageError("sum-mod needs a modulus, e.g. sum-mod:5");
    const auto k = detail::parse_u64(param, "sum-mod modulus");
    if (k == 0) throw UsageError("sum-mod modulus must be positive");
    f.name = "sum-mod:" + std::to_string(k);
    f.finite_range = true;
    f.range_size = k;
    f.eval = [k](std::span<const Value> vals) -> Answer {
      std::uint64_t acc = 0;
      for (auto v : vals) acc = (acc + v % k) % k;
      return acc;
    };
  } else if (name == "max-pid" || name == "all-equal" || name == "identity") {
    if (has_param) throw UsageError(std::string(name) + " takes no parameter");
    f.name = std::string(name);
    if (name == "max-pid") {
      f.finite_range = true;
      f.range_size = n;
      f.eval = [](std::span<const Value> vals) -> Answer {
        std::size_t best = 0;
        for (std::size_t i = 1; i < vals.size(); ++i)
          if (vals[i] >= vals[best]) best = i;
        return static_cast<std::uint64_t>(best);
      };
    } else if (name == "all-equal") {
      f.finite_range = true;
      f.range_size = 2;
      f.eval = [](std::span<const Value> vals) -> Answer {
        const bool eq = std::adjacent_find(vals.begin(), vals.end(),
                                           std::not_equal_to<>{}) == vals.end();
        return static_cast<std::uint64_t>(eq);
      };
    } else {
      f.finite_range = false;
      f.eval = [](std::span<const Value> vals) -> Answer {
        return std::vector<Value>(vals.begin(), vals.end());
      };
    }
  } else {
    throw UsageError("unknown function '" + std::string(spec) +
                     "' (expected sum-mod:k, max-pid, all-equal or identity)");
  }
  return f;
}

}  // namespace fsnap
