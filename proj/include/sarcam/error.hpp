#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sarcam {

enum class ErrorKind {
  MissingFile,
  ShapeMismatch,
  NonFiniteValue,
  InvalidValue,
  UnsupportedDType,
  UnsupportedFormat,
  InvalidManifest,
  IoFailure,
  BadIntermediateSize,
  BadFraction,
  OutOfBounds,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), message_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

}  // namespace sarcam
