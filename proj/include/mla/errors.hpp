#pragma once

#include <stdexcept>
#include <string>

namespace mla {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Scenario schema or invariant violation; the message carries the field path.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

/// Inner 1-D solver failed to converge (should not happen for valid inputs).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Equilibrium search failure (e.g. no sign change on the bisection bracket).
class OracleError : public Error {
 public:
  using Error::Error;
};

/// Wire protocol violation, malformed message, timeout or lost peer.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace mla
