#include "novascore/error.hpp"

namespace novascore {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::MissingTimestamp: return "MissingTimestamp";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DuplicateAcuId: return "DuplicateAcuId";
    case ErrorCode::UnknownCluster: return "UnknownCluster";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::CorruptRecord: return "CorruptRecord";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::ConstantInput: return "ConstantInput";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::ScriptExhausted: return "ScriptExhausted";
    case ErrorCode::NoJsonFound: return "NoJsonFound";
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::ExtractionParseError: return "ExtractionParseError";
    case ErrorCode::EmptyAcuList: return "EmptyAcuList";
    case ErrorCode::NliParseError: return "NliParseError";
    case ErrorCode::QgParseError: return "QgParseError";
    case ErrorCode::QaParseError: return "QaParseError";
  }
  return "Unknown";
}

bool is_backend_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::BackendUnavailable:
    case ErrorCode::ScriptExhausted:
    case ErrorCode::NoJsonFound:
    case ErrorCode::MalformedJson:
    case ErrorCode::ExtractionParseError:
    case ErrorCode::EmptyAcuList:
    case ErrorCode::NliParseError:
    case ErrorCode::QgParseError:
    case ErrorCode::QaParseError:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

}  // namespace novascore
