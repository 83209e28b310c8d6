#include "evicheck/error.hpp"

namespace evicheck {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid-input";
    case ErrorCode::kInvalidConfig: return "invalid-config";
    case ErrorCode::kEmptyClaim: return "empty-claim";
    case ErrorCode::kOutOfRange: return "out-of-range";
    case ErrorCode::kEmptyAfterScreening: return "empty-after-screening";
    case ErrorCode::kProviderError: return "provider-error";
    case ErrorCode::kContentNotFound: return "content-not-found";
    case ErrorCode::kNoMoreContent: return "no-more-content";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kExportError: return "export-error";
    case ErrorCode::kCorruptRecord: return "corrupt-record";
  }
  return "unknown";
}

}  // namespace evicheck
