#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bergweight {

enum class ErrorCode {
  NotHermitian,
  NotPositiveDefinite,
  DimensionMismatch,
  BasisMismatch,
  DegenerateFlag,
  InvalidP,
  RankDeficient,
  NonPositiveVolume,
  ZeroKernel,
  QuadratureUnderResolved,
  NotConvex,
  NotRotationInvariant,
  InvalidParams,
  ConfigInvalid,
  ExperimentUnknown,
  Numerical,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }
  /// The text without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace bergweight
