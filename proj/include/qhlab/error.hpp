#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qhlab {

enum class ErrorCode {
  kInvalidParameter,
  kOutsideDomain,
  kBoundaryContact,
  kResolutionTooCoarse,
  kInvalidPair,
  kNoFit,
  kConfig,
  kInternal,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI) can map it to a verdict or an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qhlab
