#pragma once

#include <stdexcept>
#include <string>

namespace warnrank {

// Numeric values are part of the C API (warnrank.h mirrors them).
enum class ErrorCode : int {
  Internal = 1,
  Io = 2,
  Config = 3,
  Lex = 10,
  Parse = 11,
  Cfg = 12,
  Sdg = 13,
  UnknownNode = 14,
  UnresolvedWarning = 15,
  Schema = 20,
  DuplicateWarning = 21,
  Unlabeled = 22,
  Capacity = 30,
  EmptyCorpus = 31,
  AllMasked = 40,
  EmptyList = 50,
  NoActualTPs = 51,
  TooFewSamples = 52,
};

const char* error_code_name(ErrorCode code) noexcept;

// Errors caused by the caller's input (files, flags, data) rather than a
// defect in the library. The CLI maps these to exit status 2.
bool is_user_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

template <ErrorCode C>
class CodedError : public Error {
 public:
  explicit CodedError(const std::string& what) : Error(C, what) {}
};

using InternalError = CodedError<ErrorCode::Internal>;
using IoError = CodedError<ErrorCode::Io>;
using ConfigError = CodedError<ErrorCode::Config>;
using LexError = CodedError<ErrorCode::Lex>;
using ParseError = CodedError<ErrorCode::Parse>;
using CfgError = CodedError<ErrorCode::Cfg>;
using SdgError = CodedError<ErrorCode::Sdg>;
using UnknownNode = CodedError<ErrorCode::UnknownNode>;
using UnresolvedWarning = CodedError<ErrorCode::UnresolvedWarning>;
using SchemaError = CodedError<ErrorCode::Schema>;
using DuplicateWarning = CodedError<ErrorCode::DuplicateWarning>;
using UnlabeledError = CodedError<ErrorCode::Unlabeled>;
using CapacityError = CodedError<ErrorCode::Capacity>;
using EmptyCorpus = CodedError<ErrorCode::EmptyCorpus>;
using AllMasked = CodedError<ErrorCode::AllMasked>;
using EmptyList = CodedError<ErrorCode::EmptyList>;
using NoActualTPs = CodedError<ErrorCode::NoActualTPs>;
using TooFewSamples = CodedError<ErrorCode::TooFewSamples>;

}  // namespace warnrank
