#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mpmrf {

enum class ErrorCode {
  NotATree,
  BadIndex,
  BadShapeParam,
  BadLambda,
  BadAlpha,
  MissingEdgeAlpha,
  NotASubtree,
  BadVectorLength,
  TooLargeForOracle,
  BadNfft,
  AliasingTolerance,
  ZeroMassAtK,
  UnresolvableQuantile,
  TailDominates,
  BadInput,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotATree: return "NotATree";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::BadShapeParam: return "BadShapeParam";
    case ErrorCode::BadLambda: return "BadLambda";
    case ErrorCode::BadAlpha: return "BadAlpha";
    case ErrorCode::MissingEdgeAlpha: return "MissingEdgeAlpha";
    case ErrorCode::NotASubtree: return "NotASubtree";
    case ErrorCode::BadVectorLength: return "BadVectorLength";
    case ErrorCode::TooLargeForOracle: return "TooLargeForOracle";
    case ErrorCode::BadNfft: return "BadNfft";
    case ErrorCode::AliasingTolerance: return "AliasingTolerance";
    case ErrorCode::ZeroMassAtK: return "ZeroMassAtK";
    case ErrorCode::UnresolvableQuantile: return "UnresolvableQuantile";
    case ErrorCode::TailDominates: return "TailDominates";
    case ErrorCode::BadInput: return "BadInput";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mpmrf
