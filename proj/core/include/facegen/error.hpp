#pragma once

#include <stdexcept>
#include <string>

namespace facegen {

enum class ErrorCode {
  kInsufficientData,
  kTopologyMismatch,
  kDimensionMismatch,
  kInvalidMesh,
  kDegenerateAttribute,
  kDegenerateGeometry,
  kDegenerateLabels,
  kMissingHead,
  kEmptyEvaluation,
  kDegeneratePairs,
  kDegenerateNormalizer,
  kInsufficientSamples,
  kNoAttributesForRegion,
  kMissingPrior,
  kInvalidSpec,
  kInvalidTask,
  kIo,
  kFormat,
};

// All library failures surface as facegen::Error. what() carries the short
// diagnostic ("topology mismatch", "degenerate normalizer", ...) optionally
// followed by ": <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace facegen
