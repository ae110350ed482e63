#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace infoforge {

enum class ErrorCode {
  kEmptySpec,
  kMalformedItem,
  kOversizeField,
  kStrokeTooShort,
  kMissingManifest,
  kCorruptAsset,
  kVersionMismatch,
  kTooFewSamples,
  kNoCandidates,
  kNoDesignsForStyle,
  kUnplaceable,
  kPivotRequired,
  kNotFound,
  kStorageFull,
  kSelectionIncomplete,
  kInvalidArgument,
};

/// Machine-readable code, e.g. "NO_CANDIDATES". Used in HTTP error bodies.
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace infoforge
