#pragma once

#include <stdexcept>
#include <string>

namespace metaband {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Rejection sampling could not produce a lambda-separated collection.
class SeparationUnsatisfiable : public Error {
 public:
  using Error::Error;
};

/// The greedy test selection found no test that eliminates anything.
class NoSeparatingTest : public Error {
 public:
  using Error::Error;
};

/// Explicit classification did not terminate within the round budget.
class MaxRoundsExceeded : public Error {
 public:
  using Error::Error;
};

/// A tree split would leave one child equal to its parent.
class NoProgress : public Error {
 public:
  using Error::Error;
};

/// No (arm, threshold) pair separates the remaining tasks.
class NoSplit : public Error {
 public:
  using Error::Error;
};

/// An iterative game solver hit its iteration cap before the requested gap.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace metaband
