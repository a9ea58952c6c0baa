#pragma once

#include <stdexcept>
#include <string>

namespace ctxalign {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input bytes: bad CSV/JSON structure, unknown tokens,
/// unparsable numbers. Messages carry a 1-based row/field locator
/// where one exists.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Structurally well-formed input that violates a model invariant
/// (duplicate ids, empty labels, out-of-range scores, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A relation of the wrong descriptor kind was passed to a
/// kind-restricted operation.
class KindError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Lookup of an entity/property/descriptor id that does not exist.
class UnknownIdError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Bundled data file failed its integrity check.
class ChecksumError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Numeric argument outside the operation's domain (negative similarity,
/// non-finite value, ...).
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// The similarity aggregate is undefined: no pairs, or every pair
/// carries zero weight.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

/// Relative improvement is undefined because the baseline is zero,
/// or an input similarity is out of domain.
class UndefinedImprovementError : public UndefinedMetricError {
 public:
  using UndefinedMetricError::UndefinedMetricError;
};

}  // namespace ctxalign
