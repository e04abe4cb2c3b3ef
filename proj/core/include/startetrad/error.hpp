#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace startetrad {

enum class ErrorCode {
  kInvalidArgument,
  kSingularPivot,
  kSingularMatrix,
  kUnknownLabel,
  kLabelClash,
  kDimensionTooSmall,
  kImproperLoadings,
  kZeroDenominator,
  kNegativeCorrelation,
  kDegenerateMargin,
  kZeroCell,
  kEmptySlice,
  kInconsistentMargins,
  kBadLength,
  kNegativeCount,
  kParseError,
  kAsymmetry,
  kNonUnitDiagonal,
  kNonBinaryValue,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library. `index` carries the offending
// position when one exists (pivot index, line number, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what,
        std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

}  // namespace startetrad
