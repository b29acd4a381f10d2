#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qmpemba {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Numerical failures. The CLI maps these to exit code 2.
class NumericalError : public Error {
public:
  using Error::Error;
};

class NonConvergence : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class DefectiveMatrix : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class SingularInput : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class BranchCut : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class NoStationaryMode : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class DegenerateHamiltonian : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class SingularReference : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class HermiticityLoss : public NumericalError {
public:
  using NumericalError::NumericalError;
};

// Precondition violations on arguments.
class DomainError : public Error {
public:
  using Error::Error;
};

class ShapeMismatch : public DomainError {
public:
  using DomainError::DomainError;
};

class InvalidState : public DomainError {
public:
  using DomainError::DomainError;
};

class NegativeRate : public DomainError {
public:
  using DomainError::DomainError;
};

class TauOutOfRange : public DomainError {
public:
  using DomainError::DomainError;
};

class IndexOutOfRange : public DomainError {
public:
  using DomainError::DomainError;
};

class GridMismatch : public DomainError {
public:
  using DomainError::DomainError;
};

class ThresholdUnreachable : public DomainError {
public:
  using DomainError::DomainError;
};

class MissingStroke : public DomainError {
public:
  using DomainError::DomainError;
};

// Configuration problems. The CLI maps these (and IoError) to exit code 3.
class ConfigError : public Error {
public:
  using Error::Error;
};

class ParseError : public ConfigError {
public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : ConfigError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                    ": " + what),
        line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

class ValidationError : public ConfigError {
public:
  ValidationError(std::string key, const std::string& constraint)
      : ConfigError(key + ": " + constraint), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

class UnknownKey : public ConfigError {
public:
  UnknownKey(std::string key, std::size_t line)
      : ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'"),
        key_(std::move(key)), line_(line) {}

  const std::string& key() const noexcept { return key_; }
  std::size_t line() const noexcept { return line_; }

private:
  std::string key_;
  std::size_t line_;
};

class IoError : public Error {
public:
  using Error::Error;
};

} // namespace qmpemba
