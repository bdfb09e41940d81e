#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sparsetrack {

enum class ErrorCode {
  kInvalidInput,
  kInvalidDimension,
  kDegenerateColumn,
  kRankDeficient,
  kEstimatorDegenerate,
  kInvalidBox,
  kZeroOverlap,
  kTrackingLost,
  kUndefinedSci,
  kUnpatchableRegion,
  kMissingBackground,
  kParse,
  kIo,
};

std::string_view to_string(ErrorCode code);

/// Every recoverable failure in the library is reported with one of these.
/// `module()` names the component that raised it so the CLI can print a
/// one-line diagnostic without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string_view module, const std::string& message)
      : std::runtime_error(std::string(module) + ": " + message),
        code_(code),
        module_(module) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorCode code_;
  std::string module_;
};

}  // namespace sparsetrack
