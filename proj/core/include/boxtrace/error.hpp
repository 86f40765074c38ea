#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace boxtrace {

// Base exception for all boxtrace errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed program or term text. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// A function was called outside its domain (e.g. the brother of the root).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// The engine reached a state that breaks one of its structural invariants.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// More than one transition guard held in the same state.
class DeterminismViolation : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

// A trace line or JSON record could not be decoded.
class TraceFormatError : public Error {
 public:
  using Error::Error;
};

// The rebuilder rejected an event. `truncated` marks a stream that ended
// where a complete trace cannot end.
class RebuildError : public Error {
 public:
  RebuildError(const std::string& message, std::uint64_t chrono, bool truncated = false)
      : Error("event " + std::to_string(chrono) + ": " + message),
        chrono_(chrono),
        truncated_(truncated) {}

  std::uint64_t chrono() const noexcept { return chrono_; }
  bool truncated() const noexcept { return truncated_; }

 private:
  std::uint64_t chrono_;
  bool truncated_;
};

}  // namespace boxtrace
