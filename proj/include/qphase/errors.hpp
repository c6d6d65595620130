#pragma once

#include <stdexcept>
#include <string>

namespace qphase {

// Bad parameters, shape mismatches, out-of-domain arguments.
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Unreadable or unwritable files and malformed file contents.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A chain or iteration produced a non-finite state.
class DivergenceError : public std::runtime_error {
public:
  DivergenceError(const std::string& what, long iteration)
      : std::runtime_error(what), iteration_(iteration) {}

  long iteration() const noexcept { return iteration_; }

private:
  long iteration_;
};

} // namespace qphase
