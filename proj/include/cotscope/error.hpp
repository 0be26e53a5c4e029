#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cotscope {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a backend is asked for something it did not declare.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

class ContextOverflowError : public Error {
 public:
  using Error::Error;
};

class BackendUnavailableError : public Error {
 public:
  using Error::Error;
};

class UnknownTokenError : public Error {
 public:
  using Error::Error;
};

class JudgingUnavailableError : public Error {
 public:
  using Error::Error;
};

class PipelineError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace cotscope
