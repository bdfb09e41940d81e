#include "sparsetrack/error.hpp"

namespace sparsetrack {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid input";
    case ErrorCode::kInvalidDimension: return "invalid dimension";
    case ErrorCode::kDegenerateColumn: return "degenerate column";
    case ErrorCode::kRankDeficient: return "rank deficient";
    case ErrorCode::kEstimatorDegenerate: return "estimator degenerate";
    case ErrorCode::kInvalidBox: return "invalid box";
    case ErrorCode::kZeroOverlap: return "zero overlap";
    case ErrorCode::kTrackingLost: return "tracking lost";
    case ErrorCode::kUndefinedSci: return "undefined sci";
    case ErrorCode::kUnpatchableRegion: return "unpatchable region";
    case ErrorCode::kMissingBackground: return "missing background";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kIo: return "i/o error";
  }
  return "unknown";
}

}  // namespace sparsetrack
