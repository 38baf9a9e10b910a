#pragma once

#include <stdexcept>
#include <string>

namespace cauchy_forensics {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (u outside (0,1),
/// lo >= hi, an over-trimmed sample, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Input records are missing, malformed, or insufficient.
class DataError : public Error {
public:
  using Error::Error;
};

/// A configuration key or value is invalid.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// The regression could not produce a valid Cauchy estimate.
class EstimationError : public Error {
public:
  using Error::Error;
};

namespace detail {

// Rethrows the in-flight library error with `prefix` prepended, keeping its type.
[[noreturn]] inline void rethrow_with_prefix(const std::string& prefix) {
  try {
    throw;
  } catch (const DomainError& e) {
    throw DomainError(prefix + e.what());
  } catch (const DataError& e) {
    throw DataError(prefix + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const EstimationError& e) {
    throw EstimationError(prefix + e.what());
  }
}

} // namespace detail
} // namespace cauchy_forensics
