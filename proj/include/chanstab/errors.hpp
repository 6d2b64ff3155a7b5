#pragma once

#include <stdexcept>
#include <string>

namespace chanstab {

/// Bad input to a library call (violated precondition on an argument).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A factorization or solve broke down; usually a shift sits on a discrete eigenvalue.
class NumericalSingularity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called on an operator that does not meet its structural requirement
/// (e.g. Gearhart-Pruss on a non-accretive matrix).
class PreconditionViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time integration produced a non-finite or unresolvable state.
class Diverged : public std::runtime_error {
 public:
  Diverged(double time, const std::string& what)
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace chanstab
