#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace choreo {

enum class ErrorCode {
  kEmptyCensus,
  kDuplicateLocation,
  kNotAMember,
  kNotASubset,
  kWitnessMismatch,
  kDecodeError,
  kEncodingError,
  kUnwrapAbsent,
  kNotAnOwner,
  kCensusNotOwned,
  kPreconditionFailed,
  kTransportError,
  kStepBudgetExceeded,
  kPeerAborted,
  kEmptyFold,
  kInputExhausted,
  kCommitmentFailed,
  kConfigError,
};

std::string_view error_code_name(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// tests and the CLI can tell them apart without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace choreo
