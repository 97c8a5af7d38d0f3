#pragma once

#include <stdexcept>
#include <string>

namespace mabkit {

/// Base class for all mabkit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejected input: bad parameter, malformed config, schema mismatch.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A file or record could not be parsed against its schema.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Referenced entity (experiment, assignment, context variable) does not exist.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// Operation conflicts with existing state (e.g. duplicate reward posting).
class ConflictError : public Error {
 public:
  using Error::Error;
};

/// Internal invariant violated; indicates a bug, not bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace mabkit
