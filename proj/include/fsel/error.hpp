#pragma once

#include <stdexcept>
#include <string>

namespace fsel {

// Error categories line up with the C API status codes and the CLI exit codes.
enum class ErrorKind {
  kUsage,         // malformed request (unknown option, bad call sequence)
  kValidation,    // input violates a documented precondition or invariant
  kIo,            // filesystem failure
  kNumerical,     // optimizer or closed form produced a non-finite value
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::kValidation, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::kNumerical, what) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::kUsage, what) {}
};

}  // namespace fsel
