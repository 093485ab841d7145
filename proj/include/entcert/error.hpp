#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace entcert {

enum class ErrorKind {
  ValueOutOfRange,
  BadKey,
  BadNoiseLevel,
  MissingData,
  ParseError,
  NotNormalized,
  TooLarge,
  SchemeMismatch,
  NotEntangled,
  NotDensity,
  BadSize,
  WrongSize,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// that callers (CLI, bindings) can map it to a stable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace entcert
