#pragma once

#include <stdexcept>
#include <string>

namespace qgp {

enum class ErrorCode {
  NonHermitian,
  NoConvergence,
  NotPositiveDefinite,
  NotPSD,
  ZeroMatrix,
  DimensionMismatch,
  WidthMismatch,
  NonUnitary,
  NoMeasurement,
  TooWide,
  ContainsMeasurement,
  InvalidArgument,
  CTooLarge,
  SingularAfterTruncation,
  ParameterCountMismatch,
  UnknownChannel,
  EmptyChannel,
  CountsExceedGrid,
  Config,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure in the library is reported through this type; `code()` lets
// callers (the CLI in particular) map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qgp
