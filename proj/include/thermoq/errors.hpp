#pragma once

#include <stdexcept>
#include <string>

namespace thermoq {

/// Input outside an operation's mathematical domain (bad frequency,
/// temperature, dimension mismatch, malformed operator ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Quadrature, optimizer or propagator failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Fisher information is not defined (zero probability with non-zero
/// derivative, or a state derivative leaking out of the state support).
class IllDefinedFisher : public std::runtime_error {
 public:
  explicit IllDefinedFisher(const std::string& what)
      : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw DomainError(msg);
}

}  // namespace detail
}  // namespace thermoq
