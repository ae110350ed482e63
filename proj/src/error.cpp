#include "infoforge/error.hpp"

namespace infoforge {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptySpec: return "EMPTY_SPEC";
    case ErrorCode::kMalformedItem: return "MALFORMED_ITEM";
    case ErrorCode::kOversizeField: return "OVERSIZE_FIELD";
    case ErrorCode::kStrokeTooShort: return "STROKE_TOO_SHORT";
    case ErrorCode::kMissingManifest: return "MISSING_MANIFEST";
    case ErrorCode::kCorruptAsset: return "CORRUPT_ASSET";
    case ErrorCode::kVersionMismatch: return "VERSION_MISMATCH";
    case ErrorCode::kTooFewSamples: return "TOO_FEW_SAMPLES";
    case ErrorCode::kNoCandidates: return "NO_CANDIDATES";
    case ErrorCode::kNoDesignsForStyle: return "NO_DESIGNS_FOR_STYLE";
    case ErrorCode::kUnplaceable: return "UNPLACEABLE";
    case ErrorCode::kPivotRequired: return "PIVOT_REQUIRED";
    case ErrorCode::kNotFound: return "NOT_FOUND";
    case ErrorCode::kStorageFull: return "STORAGE_FULL";
    case ErrorCode::kSelectionIncomplete: return "SELECTION_INCOMPLETE";
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
  }
  return "UNKNOWN";
}

}  // namespace infoforge
