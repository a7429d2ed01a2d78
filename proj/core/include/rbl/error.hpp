#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rbl {

enum class ErrorKind {
  InfeasibleSpec,
  AlphaOutOfRange,
  MadMismatch,
  IndexOutOfRange,
  NumericalInstability,
  TooManyFactors,
  LengthMismatch,
  NegativePrice,
  EpsOutOfRange,
  CapExceeded,
  TruncationTooLow,
  GammaOutOfRange,
  MembershipViolation,
  LambdaOutOfRange,
  RangeError,
  ParamOutOfRange,
  ConfigError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every precondition failure in the library is reported through this type;
/// `kind()` lets callers branch without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rbl
