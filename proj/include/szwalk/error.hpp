#pragma once

#include <stdexcept>
#include <string>

namespace szwalk {

enum class ErrorCode {
  NonSquare,
  NegativeEntry,
  ZeroColumn,
  NotStochastic,
  DimensionMismatch,
  ShapeMismatch,
  IndexOutOfRange,
  NotPerfectSquare,
  ZeroNorm,
  NotNormalized,
  EmptyPipeline,
  WeightsNotNormalized,
  NotOrthonormal,
  HeterogeneousBatch,
  BatchSizeZero,
  CapExceeded,
  NoConvergence,
  InsufficientSizes,
  BrokenStochasticity,
  InvalidArgument,
  IoError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Process exit code the CLI uses for a given failure: 2 usage, 3 input
/// validation, 4 numerical breakage detected mid-run.
inline int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument:
      return 2;
    case ErrorCode::NotNormalized:
    case ErrorCode::NoConvergence:
    case ErrorCode::BrokenStochasticity:
      return 4;
    default:
      return 3;
  }
}

}  // namespace szwalk
