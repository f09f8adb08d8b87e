#pragma once

#include <stdexcept>
#include <string>

namespace metricdft {

/// Caller broke a documented precondition. CLI exit code 2.
class ContractViolation : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to converge or lost accuracy. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// File, parse, or schema problems. CLI exit code 4.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string &what) {
  if (!ok)
    throw ContractViolation(what);
}

} // namespace metricdft
