#pragma once

#include <stdexcept>
#include <string>

namespace fibersym {

// Error categories mirror the C API status codes and the CLI exit codes.
enum class ErrorKind {
  Domain = 2,      // invalid argument or precondition
  Validation = 3,  // malformed or out-of-range input data
  Numeric = 4,     // divergence, degenerate statistics
  Io = 5,          // missing files, unwritable outputs
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string error_class, const std::string& what)
      : std::runtime_error(what), kind_(kind), class_(std::move(error_class)) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Short machine-parsable name, e.g. "NoData" or "TrainingDiverged".
  const std::string& error_class() const noexcept { return class_; }

 private:
  ErrorKind kind_;
  std::string class_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what, std::string cls = "Domain")
      : Error(ErrorKind::Domain, std::move(cls), what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what, std::string cls = "Validation")
      : Error(ErrorKind::Validation, std::move(cls), what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what, std::string cls = "Numeric")
      : Error(ErrorKind::Numeric, std::move(cls), what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what, std::string cls = "IO")
      : Error(ErrorKind::Io, std::move(cls), what) {}
};

}  // namespace fibersym
