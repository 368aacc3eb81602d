#pragma once

#include <stdexcept>
#include <string>

namespace fsnap {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad configuration or arguments (function spec, flags, budgets).
struct UsageError : Error {
  using Error::Error;
};

/// API misuse that can only be a programming bug, e.g. pid out of range.
struct MisuseError : Error {
  using Error::Error;
};

/// find_max found no maximal pid. Unreachable for flags produced by the
/// algorithm; seeing it means the implementation is broken.
struct NoMaximal : Error {
  using Error::Error;
};

struct MalformedHistory : Error {
  using Error::Error;
};

struct PendingOperations : Error {
  using Error::Error;
};

struct BudgetExceeded : Error {
  using Error::Error;
};

/// Distinct-value tracking hit its cap.
struct CapExceeded : Error {
  using Error::Error;
};

}  // namespace fsnap
