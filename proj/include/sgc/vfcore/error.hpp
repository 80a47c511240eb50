#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sgc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed field expression; `position` is a 0-based character offset.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : Error("parse error at position " + std::to_string(position) + ": " + message),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  using Error::Error;
};

// A field was asked for dual-number evaluation it cannot provide.
class NotDifferentiable : public Error {
 public:
  using Error::Error;
};

// A structural hypothesis of the analysis does not hold for the given frame.
class HypothesisError : public Error {
 public:
  HypothesisError(std::string check, const std::string& message)
      : Error(check + ": " + message), check_(std::move(check)) {}
  const std::string& check() const noexcept { return check_; }

 private:
  std::string check_;
};

}  // namespace sgc
