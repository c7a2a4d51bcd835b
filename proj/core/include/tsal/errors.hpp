#pragma once

#include <stdexcept>
#include <string>

namespace tsal {

/// Precondition violated by the caller (dimension mismatch, empty region, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not produce a usable result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Object used in the wrong state, e.g. querying an unfitted model.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Kernel/measure combination without a closed-form marginal.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Candidate whose Schur complement falls below the degeneracy floor.
class DegenerateCandidate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested computation exceeds a hard resource guard.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tsal
