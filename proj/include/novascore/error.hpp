#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace novascore {

enum class ErrorCode {
  // validation / data
  InvalidArgument,
  EmptyText,
  DuplicateId,
  MissingTimestamp,
  ParseError,
  UnknownLabel,
  DimensionMismatch,
  DuplicateAcuId,
  UnknownCluster,
  UnsupportedVersion,
  CorruptRecord,
  IoError,
  EmptyDocument,
  DegenerateLabels,
  ConstantInput,
  LengthMismatch,
  SingleClass,
  // backend / generative model
  BackendUnavailable,
  ScriptExhausted,
  NoJsonFound,
  MalformedJson,
  ExtractionParseError,
  EmptyAcuList,
  NliParseError,
  QgParseError,
  QaParseError,
};

std::string_view to_string(ErrorCode code);

// True for failures that originate in a model backend call or in parsing
// its output. The pipeline degrades these to skipped documents.
bool is_backend_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  // The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace novascore
