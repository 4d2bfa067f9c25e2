#pragma once

#include <stdexcept>
#include <string>

namespace pmc {

/// Base class for all toolkit failures. `exit_code()` is the process exit
/// status the CLI maps the error to.
class toolkit_error : public std::runtime_error {
public:
  explicit toolkit_error(const std::string& what) : std::runtime_error(what) {}
  virtual int exit_code() const { return 1; }
};

/// Violated precondition, shape mismatch, degenerate window, horizon
/// mismatch, or any other broken call contract.
class contract_error : public toolkit_error {
public:
  using toolkit_error::toolkit_error;
  int exit_code() const override { return 2; }
};

/// A Gram (or other) solve exceeded the configured condition guard.
class conditioning_error : public toolkit_error {
public:
  using toolkit_error::toolkit_error;
  int exit_code() const override { return 3; }
};

/// Structural loss of approximate controllability: coincident eigenvalues,
/// vanishing observation, or a zero coupling coefficient.
class approx_controllability_error : public toolkit_error {
public:
  using toolkit_error::toolkit_error;
  int exit_code() const override { return 4; }
};

/// Numerical failure (non-convergent eigensolve, quadrature breakdown).
class numeric_error : public toolkit_error {
public:
  using toolkit_error::toolkit_error;
};

} // namespace pmc
