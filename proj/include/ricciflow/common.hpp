#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ricciflow {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A state or parameter lies outside the mathematical domain (e.g. a
/// non-positive metric coefficient).
struct DomainError : Error {
  using Error::Error;
};

/// The integrator left the admissible box or exceeded its step budget.
struct IntegrationError : Error {
  double last_good_time;
  IntegrationError(const std::string& msg, double t)
      : Error(msg), last_good_time(t) {}
};

/// Volume drift exceeded the configured ceiling.
struct ConservationError : Error {
  double drift;
  double worst_time;
  ConservationError(const std::string& msg, double d, double wt)
      : Error(msg), drift(d), worst_time(wt) {}
};

/// Requested closed form / lemma does not exist for this class.
struct NotAvailableError : Error {
  using Error::Error;
};

struct ClassError : Error {
  using Error::Error;
};

struct RangeError : Error {
  using Error::Error;
};

struct PolicyError : Error {
  using Error::Error;
};

struct ParameterError : Error {
  using Error::Error;
};

struct PreconditionError : Error {
  using Error::Error;
};

/// The class-specific Ricci ordering never holds through the end of the
/// sampled span.
struct NoTauError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

/// Richardson check on a composite quadrature failed.
struct QuadratureError : Error {
  using Error::Error;
};

struct TimeSeries {
  std::vector<double> times;
  std::vector<double> values;
};

}  // namespace ricciflow
