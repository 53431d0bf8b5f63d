#pragma once

#include <stdexcept>
#include <string>

namespace riskalloc {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  Infeasible,
  Parse,
  Io,
};

/// Exception type thrown by every module of the library. The C API maps
/// `kind()` onto its status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace riskalloc
