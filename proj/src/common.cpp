#include "bdc/common.hpp"

#include <cmath>

namespace bdc {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCapacityExceeded: return "CapacityExceeded";
    case ErrorCode::kCycleDetected: return "CycleDetected";
    case ErrorCode::kUnknownVertex: return "UnknownVertex";
    case ErrorCode::kEdgeNotInForest: return "EdgeNotInForest";
    case ErrorCode::kKeyLengthMismatch: return "KeyLengthMismatch";
    case ErrorCode::kBatchTooLarge: return "BatchTooLarge";
    case ErrorCode::kMalformedJoinPair: return "MalformedJoinPair";
    case ErrorCode::kSelfLoop: return "SelfLoop";
    case ErrorCode::kEdgeAbsent: return "EdgeAbsent";
    case ErrorCode::kEdgeIdCollision: return "EdgeIdCollision";
    case ErrorCode::kContractionStalled: return "ContractionStalled";
    case ErrorCode::kNotTopologicallyOrdered: return "NotTopologicallyOrdered";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kVertexOutOfRange: return "VertexOutOfRange";
    case ErrorCode::kBadParams: return "BadParams";
  }
  return "Unknown";
}

std::size_t ceil_log2(double x, std::size_t floor_value) {
  if (x <= 1.0) return floor_value;
  const auto v = static_cast<std::size_t>(std::ceil(std::log2(x) - 1e-12));
  return v < floor_value ? floor_value : v;
}

}  // namespace bdc
