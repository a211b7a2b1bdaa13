#pragma once

#include <stdexcept>
#include <string>

namespace expdyn {

enum class ErrorKind {
  kValidation,   // bad parameters or malformed input
  kRange,        // value outside native floating range
  kDomain,       // no preimage / point outside an operation's domain
  kConvergence,  // iterative procedure did not settle
  kPrecision,    // argument precision exhausted
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& m) : Error(ErrorKind::kValidation, m) {}
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& m) : Error(ErrorKind::kRange, m) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& m) : Error(ErrorKind::kDomain, m) {}
};

class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& m) : Error(ErrorKind::kConvergence, m) {}
};

class PrecisionError : public Error {
 public:
  explicit PrecisionError(const std::string& m) : Error(ErrorKind::kPrecision, m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorKind::kIo, m) {}
};

}  // namespace expdyn
