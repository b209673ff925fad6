#pragma once

#include <stdexcept>
#include <string>

namespace hysup {

struct InvalidConfig : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidParams : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A flow-map evaluation produced a non-finite value.
struct NumericalBlowup : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The jump map enumerated zero successors at a point of the jump set.
struct EmptyJumpMap : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingLyapunov : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A class-K-infinity inverse could not be bracketed by doubling.
struct BracketFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Sublevel-set sampling could not enclose the set in a finite box.
struct UnboundedSublevel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hysup
