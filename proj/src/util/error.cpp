#include "util/error.hpp"

namespace warnrank {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Internal: return "InternalError";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::Lex: return "LexError";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::Cfg: return "CfgError";
    case ErrorCode::Sdg: return "SdgError";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::UnresolvedWarning: return "UnresolvedWarning";
    case ErrorCode::Schema: return "SchemaError";
    case ErrorCode::DuplicateWarning: return "DuplicateWarning";
    case ErrorCode::Unlabeled: return "UnlabeledError";
    case ErrorCode::Capacity: return "CapacityError";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::AllMasked: return "AllMasked";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::NoActualTPs: return "NoActualTPs";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
  }
  return "Error";
}

bool is_user_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Internal:
    case ErrorCode::AllMasked:
      return false;
    default:
      return true;
  }
}

}  // namespace warnrank
