#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace evicheck {

enum class ErrorCode {
  kInvalidInput,
  kInvalidConfig,
  kEmptyClaim,
  kOutOfRange,
  kEmptyAfterScreening,
  kProviderError,  // retryable
  kContentNotFound,
  kNoMoreContent,
  kNotFound,
  kExportError,
  kCorruptRecord,
};

std::string_view error_code_name(ErrorCode code);

// Single exception type for the whole library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  bool retryable() const noexcept { return code_ == ErrorCode::kProviderError; }

 private:
  ErrorCode code_;
};

}  // namespace evicheck
