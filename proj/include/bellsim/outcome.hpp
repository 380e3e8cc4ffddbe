#pragma once

#include "bellsim/errors.hpp"

namespace bellsim {

// Measurement outcome, exactly -1 or +1.
class Outcome {
 public:
  explicit Outcome(int value) : v_(value) {
    if (value != 1 && value != -1) {
      throw ModelFailure("outcome must be +1 or -1, got " +
                         std::to_string(value));
    }
  }

  int value() const { return v_; }
  // 0 for -1, 1 for +1; handy as a table index.
  int index() const { return v_ > 0 ? 1 : 0; }

  static Outcome plus() { return Outcome(+1); }
  static Outcome minus() { return Outcome(-1); }
  static Outcome from_index(int idx) { return Outcome(idx == 0 ? -1 : +1); }

  bool operator==(const Outcome& o) const { return v_ == o.v_; }

 private:
  int v_;
};

}  // namespace bellsim
