#pragma once

// Atomic reference implementation: update writes A[i], Fscan returns F(A).

#include <vector>

#include "fsnap/error.hpp"
#include "fsnap/function.hpp"

namespace fsnap {

class OracleState {
 public:
  /// `f` must outlive the state; copies share it.
  OracleState(const FFunction& f, std::size_t n, Value x0)
      : f_(&f), slots_(n, x0) {}

  void update(Pid i, Value v) {
    if (i >= slots_.size()) throw MisuseError("oracle update pid out of range");
    slots_[i] = v;
  }

  Answer fscan() const { return (*f_)(slots_); }

  const std::vector<Value>& slots() const noexcept { return slots_; }
  const FFunction& function() const noexcept { return *f_; }

  friend bool operator==(const OracleState& a, const OracleState& b) {
    return a.slots_ == b.slots_;
  }

 private:
  const FFunction* f_;
  std::vector<Value> slots_;
};

}  // namespace fsnap
