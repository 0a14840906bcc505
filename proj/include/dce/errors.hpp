#pragma once

#include <stdexcept>
#include <string>

namespace dce {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or configuration values.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A dressed-state label could not be resolved to an eigenvector.
class LabelError : public Error {
 public:
  using Error::Error;
};

// An analytic formula was evaluated at (or numerically on) one of its poles.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// Non-degenerate formula called at a degeneracy, or the converse.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

// Time integration failed (step underflow, positivity loss, truncation).
class IntegrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace dce
