#include "qgp/error.hpp"

namespace qgp {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::ZeroMatrix: return "ZeroMatrix";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::NonUnitary: return "NonUnitary";
    case ErrorCode::NoMeasurement: return "NoMeasurement";
    case ErrorCode::TooWide: return "TooWide";
    case ErrorCode::ContainsMeasurement: return "ContainsMeasurement";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::CTooLarge: return "CTooLarge";
    case ErrorCode::SingularAfterTruncation: return "SingularAfterTruncation";
    case ErrorCode::ParameterCountMismatch: return "ParameterCountMismatch";
    case ErrorCode::UnknownChannel: return "UnknownChannel";
    case ErrorCode::EmptyChannel: return "EmptyChannel";
    case ErrorCode::CountsExceedGrid: return "CountsExceedGrid";
    case ErrorCode::Config: return "Config";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace qgp
