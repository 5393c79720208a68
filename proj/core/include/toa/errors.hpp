#pragma once

#include <stdexcept>
#include <string>

namespace toa {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An adaptive scheme exhausted its iteration / subdivision budget.
struct NonConvergence : Error {
  using Error::Error;
};

/// Root bracket endpoints do not straddle a sign change.
struct NoSignChange : Error {
  using Error::Error;
};

/// Minimization bracket is empty or inverted.
struct BracketInvalid : Error {
  using Error::Error;
};

/// An argument lies outside the mathematical domain of the operation.
struct DomainError : Error {
  using Error::Error;
};

/// Requested state would not have strictly positive momentum support.
struct SupportNotPositive : Error {
  using Error::Error;
};

/// A phase-space grid failed its marginal consistency check.
struct GridTooCoarse : Error {
  using Error::Error;
};

/// A Fourier sampling grid cannot represent the requested transform.
struct FourierGridError : Error {
  using Error::Error;
};

/// A density matrix has no weight left after a projection.
struct ZeroMass : Error {
  using Error::Error;
};

/// Configuration file is malformed or fails validation.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace toa
