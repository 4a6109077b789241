#pragma once

#include <stdexcept>
#include <string>

namespace qf {

// Machine-readable category, used by the CLI to build its stderr JSON.
enum class ErrorKind {
  Dimension,
  Schema,
  NotUnitary,
  NotFormula,
  NotCp,
  Precondition,
  Budget,
  Range,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& message)
      : Error(ErrorKind::Dimension, message) {}
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& message)
      : Error(ErrorKind::Schema, message) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& message)
      : Error(ErrorKind::Precondition, message) {}
};

class BudgetError : public Error {
 public:
  explicit BudgetError(const std::string& message)
      : Error(ErrorKind::Budget, message) {}
};

// Raised when a matrix that must be unitary is not; carries ||U^dag U - I||.
class UnitarityError : public Error {
 public:
  UnitarityError(const std::string& message, double residual)
      : Error(ErrorKind::NotUnitary, message), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Raised when a super-operator fails complete positivity; carries the most
// negative Choi eigenvalue.
class NotCpError : public Error {
 public:
  NotCpError(const std::string& message, double eigenvalue)
      : Error(ErrorKind::NotCp, message), eigenvalue_(eigenvalue) {}

  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

}  // namespace qf
