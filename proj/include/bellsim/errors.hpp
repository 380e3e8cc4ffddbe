#pragma once

#include <stdexcept>
#include <string>

namespace bellsim {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A policy or direction failed validation (bad weights, empty pair list, ...).
struct InvalidPolicy : Error {
  using Error::Error;
};

// Caller-supplied argument out of range (n_runs = 0, bad grid, unknown id, ...).
struct InvalidArgument : Error {
  using Error::Error;
};

// A model produced a state outside its declared domain, or was asked for a
// setting outside its declared setting set.
struct ModelFailure : Error {
  using Error::Error;
};

// Exact-mode operation requested on a model with no exact interface.
struct NoExactInterface : Error {
  using Error::Error;
};

// Not enough matching runs in an ensemble to estimate anything.
struct InsufficientRuns : Error {
  using Error::Error;
};

// A recorded state cannot be mapped onto the declared domain's bins.
struct UndiscretizableState : Error {
  using Error::Error;
};

// Weighted-dice weight list rejected.
struct InvalidWeights : Error {
  using Error::Error;
};

// A game strategy signalled that it needed data the channel does not provide.
struct StrategyViolation : Error {
  using Error::Error;
};

// Malformed NDJSON/JSON/config input.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace bellsim
