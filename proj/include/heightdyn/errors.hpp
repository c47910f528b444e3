#pragma once

#include <stdexcept>
#include <string>

namespace heightdyn {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arithmetic mixing two distinct quadratic fields Q(√d1), Q(√d2).
class IncompatibleFieldError : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument's value was violated (division by zero,
/// negative radicand, non-ample divisor where an ample one is required, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Vector/matrix shapes or point signatures disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A quantity whose closed form leaves the working field Q(√d) was requested
/// exactly. Callers fall back to bisection.
class NotRepresentableError : public Error {
 public:
  using Error::Error;
};

/// A polynomial map is evaluated at a point where one target block vanishes.
class BasePointError : public Error {
 public:
  using Error::Error;
};

/// A pullback matrix fails one of the structural constraints of dominant
/// endomorphisms of a product of projective spaces.
class ClassificationError : public Error {
 public:
  enum class Kind { invalid_row, not_block_diagonal, not_dominant, internal };

  ClassificationError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

const char* to_string(ClassificationError::Kind kind);

/// Malformed input document. `path` is a JSON-pointer-like location such as
/// `$.cone.gram[1][0]`.
class ParseError : public Error {
 public:
  ParseError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace heightdyn
