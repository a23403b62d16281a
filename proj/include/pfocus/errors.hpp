#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pfocus {

enum class ErrorCode {
  // jets
  ConstantTerm,
  ZeroLinearPart,
  InsufficientOrder,
  UnsupportedLinearPart,
  IdenticalJets,
  // dyn1d
  NotContracting,
  DomainError,
  GapsNotEventuallyMonotone,
  Underflow,
  // fracdim
  GridTooLarge,
  DegenerateFit,
  InvalidOrder,
  // pwflow
  EscapedNeighborhood,
  NoCrossing,
  TangentialAmbiguity,
  OrientationViolated,
  NotResolved,
  NonIntegerSlope,
  // realize
  NotInvolutionToOrder,
  UnsupportedJet,
  // shared
  InvalidInput,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Typed failure raised by every module. The code is stable and is what the
/// CLI maps to exit statuses; the message carries the offending values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace pfocus
