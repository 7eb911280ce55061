#pragma once

#include <stdexcept>
#include <string>

namespace sqfn {

/// Input violates an operation's precondition (bad parameter, malformed tree, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested object would not fit (leaf-count overflow).
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Two functions that must share a tree do not.
class TreeMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical search could not resolve its target (bisection budget, regime checks).
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sqfn
