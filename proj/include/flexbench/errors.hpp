#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flexbench {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of a transform.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A model could not be estimated from the given data.
class FitError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent data file. `line` is 1-based, 0 when unknown.
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Invalid experiment or solver configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// External solver could not be found at the configured command.
class SolverNotFound : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Failure while running an external solver or reading what it produced.
class SolverError : public Error {
 public:
  using Error::Error;
};

class SolverExitError : public SolverError {
 public:
  SolverExitError(const std::string& what, int code) : SolverError(what), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

class SolverOutputError : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace flexbench
