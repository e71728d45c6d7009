#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace icdb {

// Root of every exception thrown by the library. Callers that only need to
// distinguish "icdb failed" from other failures catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scheme id unknown, or a code produced by one scheme presented to another.
class SchemeError : public Error {
 public:
  using Error::Error;
};

// Code bytes whose shape cannot belong to the scheme (wrong length, bad
// padding, unparseable recovered plaintext). Distinct from "does not match".
class StructuralError : public Error {
 public:
  using Error::Error;
};

class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

class OversizeError : public Error {
 public:
  using Error::Error;
};

class KeyError : public Error {
 public:
  using Error::Error;
};

// Serial allocator ran out of u64 space.
class AllocatorExhausted : public Error {
 public:
  using Error::Error;
};

// Operation argument outside the state it is defined on, e.g. revoking a
// serial that was never allocated.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Text format error carrying a 1-based line number.
class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class ConstraintViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace icdb
