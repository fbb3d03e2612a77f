#include "bergweight/error.hpp"

namespace bergweight {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::BasisMismatch: return "BasisMismatch";
    case ErrorCode::DegenerateFlag: return "DegenerateFlag";
    case ErrorCode::InvalidP: return "InvalidP";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NonPositiveVolume: return "NonPositiveVolume";
    case ErrorCode::ZeroKernel: return "ZeroKernel";
    case ErrorCode::QuadratureUnderResolved: return "QuadratureUnderResolved";
    case ErrorCode::NotConvex: return "NotConvex";
    case ErrorCode::NotRotationInvariant: return "NotRotationInvariant";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ExperimentUnknown: return "ExperimentUnknown";
    case ErrorCode::Numerical: return "Numerical";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace bergweight
