#include "startetrad/error.hpp"

namespace startetrad {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kSingularPivot: return "SingularPivot";
    case ErrorCode::kSingularMatrix: return "SingularMatrix";
    case ErrorCode::kUnknownLabel: return "UnknownLabel";
    case ErrorCode::kLabelClash: return "LabelClash";
    case ErrorCode::kDimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::kImproperLoadings: return "ImproperLoadings";
    case ErrorCode::kZeroDenominator: return "ZeroDenominator";
    case ErrorCode::kNegativeCorrelation: return "NegativeCorrelation";
    case ErrorCode::kDegenerateMargin: return "DegenerateMargin";
    case ErrorCode::kZeroCell: return "ZeroCell";
    case ErrorCode::kEmptySlice: return "EmptySlice";
    case ErrorCode::kInconsistentMargins: return "InconsistentMargins";
    case ErrorCode::kBadLength: return "BadLength";
    case ErrorCode::kNegativeCount: return "NegativeCount";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kAsymmetry: return "AsymmetryError";
    case ErrorCode::kNonUnitDiagonal: return "NonUnitDiagonal";
    case ErrorCode::kNonBinaryValue: return "NonBinaryValue";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace startetrad
