#pragma once

#include <stdexcept>
#include <string>

namespace qprep {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violations: sizes, ranges, malformed arguments.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Iterative routines that failed to converge, non-finite values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Moment targets that no ensemble can reproduce.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// A ground state requested at a degenerate Fermi level.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Exact methods requested above their configured size cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A formula evaluated outside its domain (e.g. a negative radicand).
class DomainError : public Error {
 public:
  using Error::Error;
};

namespace detail {
[[noreturn]] inline void fail_invalid(const std::string& what) { throw InvalidArgument(what); }
}  // namespace detail

#define QPREP_REQUIRE(cond, msg)                                   \
  do {                                                             \
    if (!(cond)) ::qprep::detail::fail_invalid(std::string(msg)); \
  } while (0)

}  // namespace qprep
