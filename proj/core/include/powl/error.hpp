#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace powl2 {

// Malformed input text (XML, CSV, JSON). Carries the 1-based line when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that does not match the expected layout.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller violated an operation precondition.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Semantically unusable input, e.g. an empty log handed to discovery.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal invariant broke. Always a bug.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A metric whose denominator vanished.
class UndefinedMetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace powl2
