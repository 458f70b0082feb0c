#pragma once

#include <stdexcept>
#include <string>

namespace momentforge {

/// Base class for every error raised by the library. The CLI maps all of
/// these to exit code 2 (input error).
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operands live in different dimensions or have different index sets.
class DimensionMismatch : public Error {
public:
  using Error::Error;
};

/// A truncated object does not reach far enough for the requested operation.
class DegreeError : public Error {
public:
  using Error::Error;
};

/// A value lies outside the domain of an operation (nonpositive entry,
/// atom outside the orthant, negative weight, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Malformed serialized input.
class ParseError : public Error {
public:
  using Error::Error;
};

}  // namespace momentforge
