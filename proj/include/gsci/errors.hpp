#pragma once

#include <stdexcept>
#include <string>

namespace gsci {

// Bad parameter values handed to an operation (exit code 1 at the CLI).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unreadable or ill-formed input files and strings (exit code 1).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Work or memory bound exceeded (exit code 2).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A mathematical invariant failed at run time; indicates a bug (exit code 3).
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace gsci
