#include "choreo/error.hpp"

namespace choreo {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyCensus: return "EmptyCensus";
    case ErrorCode::kDuplicateLocation: return "DuplicateLocation";
    case ErrorCode::kNotAMember: return "NotAMember";
    case ErrorCode::kNotASubset: return "NotASubset";
    case ErrorCode::kWitnessMismatch: return "WitnessMismatch";
    case ErrorCode::kDecodeError: return "DecodeError";
    case ErrorCode::kEncodingError: return "EncodingError";
    case ErrorCode::kUnwrapAbsent: return "UnwrapAbsent";
    case ErrorCode::kNotAnOwner: return "NotAnOwner";
    case ErrorCode::kCensusNotOwned: return "CensusNotOwned";
    case ErrorCode::kPreconditionFailed: return "PreconditionFailed";
    case ErrorCode::kTransportError: return "TransportError";
    case ErrorCode::kStepBudgetExceeded: return "StepBudgetExceeded";
    case ErrorCode::kPeerAborted: return "PeerAborted";
    case ErrorCode::kEmptyFold: return "EmptyFold";
    case ErrorCode::kInputExhausted: return "InputExhausted";
    case ErrorCode::kCommitmentFailed: return "CommitmentFailed";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace choreo
