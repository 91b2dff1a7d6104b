#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace angulus {

enum class ErrorCode {
  InvalidArgument,
  RankDeficient,
  DimensionMismatch,
  UnknownModel,
  MissingParam,
  Diverged,
  WindowTooLong,
  FiberRankDeficient,
  HorizonExceedsFibers,
  UnsupportedFiberDim,
  NumericalIntersectionAmbiguous,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::MissingParam: return "MissingParam";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::WindowTooLong: return "WindowTooLong";
    case ErrorCode::FiberRankDeficient: return "FiberRankDeficient";
    case ErrorCode::HorizonExceedsFibers: return "HorizonExceedsFibers";
    case ErrorCode::UnsupportedFiberDim: return "UnsupportedFiberDim";
    case ErrorCode::NumericalIntersectionAmbiguous: return "NumericalIntersectionAmbiguous";
  }
  return "Unknown";
}

/// Library-wide exception; `code()` identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace angulus
