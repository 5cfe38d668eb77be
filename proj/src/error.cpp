#include "qhlab/error.hpp"

namespace qhlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParameter: return "invalid-parameter";
    case ErrorCode::kOutsideDomain: return "outside-domain";
    case ErrorCode::kBoundaryContact: return "boundary-contact";
    case ErrorCode::kResolutionTooCoarse: return "resolution-too-coarse";
    case ErrorCode::kInvalidPair: return "invalid-pair";
    case ErrorCode::kNoFit: return "no-fit";
    case ErrorCode::kConfig: return "config-error";
    case ErrorCode::kInternal: return "internal-error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace qhlab
