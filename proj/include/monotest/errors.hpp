#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace monotest {

// A point, level or parameter lies outside the domain an operation accepts.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An exact oracle or enumeration would exceed its size cap.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Tester configuration is unusable for the requested algorithm (e.g. eps*n < 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The greedy violating-pair procedure stalled: the input is not as far from
// monotone as the caller claimed.
class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace monotest
