#pragma once

// Text file formats.
//
// Every format is whitespace tolerant and skips blank lines and lines whose
// first non-blank character is '#'. An optional header line of names may
// precede the data; a line whose first token is not a number is a header.
//
//   counts  2^q non-negative integers, count-vector order, any line layout
//   corr    a full square matrix, or its lower triangle (row i has i entries)
//   raw     one observation per line, 0/1 values separated by commas or
//           whitespace

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "startetrad/matrix.hpp"
#include "startetrad/tables.hpp"

namespace startetrad {

struct CorrelationInput {
  SquareMatrix matrix;
  // Non-fatal findings, e.g. an off-diagonal entry outside [-1, 1].
  std::vector<std::string> warnings;
};

// Whole file contents. Throws Error{kIo}.
std::string read_text_file(const std::filesystem::path& path);

// Errors: kBadLength (token count not 2^q), kNegativeCount, kParseError
// (index = 1-based line, message names line and column).
CountTable parse_count_vector(std::string_view text);
CountTable read_count_vector(const std::filesystem::path& path);

// Errors: kParseError, kAsymmetry, kNonUnitDiagonal (both at 1e-9).
CorrelationInput parse_correlation_matrix(std::string_view text);
CorrelationInput read_correlation_matrix(const std::filesystem::path& path);

// Rows aggregated into a 2^q table. Errors: kParseError, kNonBinaryValue.
CountTable parse_raw_binary(std::string_view text);
CountTable read_raw_binary(const std::filesystem::path& path);

// Writers; each output parses back to an equal value.
std::string format_count_vector(const CountTable& t);
std::string format_correlation_matrix(const SquareMatrix& m);
// One row per observation, cells in count-vector order.
std::string format_raw_binary(const CountTable& t);

void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace startetrad
