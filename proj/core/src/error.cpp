#include "permchar/error.hpp"

namespace permchar {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInvalidCycleType: return "invalid-cycle-type";
    case ErrorCode::kSizeLimit: return "size-limit";
    case ErrorCode::kHorizonTooSmall: return "horizon-too-small";
    case ErrorCode::kInvalidCoefficients: return "invalid-coefficients";
    case ErrorCode::kSingularSample: return "singular-sample";
    case ErrorCode::kDimensionUnsupported: return "dimension-unsupported";
    case ErrorCode::kResonantFrequency: return "resonant-frequency";
    case ErrorCode::kSingularPointHit: return "singular-point-hit";
    case ErrorCode::kPointOutsideBox: return "point-outside-box";
    case ErrorCode::kNonConvergence: return "non-convergence";
    case ErrorCode::kRegimeViolation: return "regime-violation";
    case ErrorCode::kConfig: return "config";
  }
  return "unknown";
}

}  // namespace permchar
