#pragma once

#include <stdexcept>
#include <string>

namespace hfeyn {

/// Base class for every domain error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TruncationMismatch : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class AsymmetricTensor : public Error {
 public:
  using Error::Error;
};

class QuadraticInteraction : public Error {
 public:
  using Error::Error;
};

class InvalidModel : public Error {
 public:
  using Error::Error;
};

class NonScalarInput : public Error {
 public:
  using Error::Error;
};

class ArityMismatch : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

// Raised when a computation breaks an invariant that is proven to hold,
// e.g. the rewrite step budget is exhausted.
class InternalError : public Error {
 public:
  using Error::Error;
};

/// Line 0 means the text did not come from a file (e.g. an observable).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace hfeyn
