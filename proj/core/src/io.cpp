#include "startetrad/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <system_error>

#include "startetrad/error.hpp"

namespace startetrad {
namespace {

constexpr double kFormatTolerance = 1e-9;

struct Token {
  std::string_view text;
  std::size_t line = 0;    // 1-based
  std::size_t column = 0;  // 1-based
};

using Row = std::vector<Token>;

bool is_separator(char c, bool commas) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v' || (commas && c == ',');
}

// Non-comment, non-blank lines split into tokens.
std::vector<Row> tokenize(std::string_view text, bool commas) {
  std::vector<Row> rows;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    ++line_no;
    Row row;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && is_separator(line[pos], commas)) ++pos;
      if (pos >= line.size()) break;
      if (row.empty() && line[pos] == '#') break;
      std::size_t stop = pos;
      while (stop < line.size() && !is_separator(line[stop], commas)) ++stop;
      row.push_back({line.substr(pos, stop - pos), line_no, pos + 1});
      pos = stop;
    }
    if (!row.empty()) rows.push_back(std::move(row));
    if (end == text.size()) break;
    start = end + 1;
  }
  return rows;
}

std::string where(const Token& t) {
  return "line " + std::to_string(t.line) + ", column " + std::to_string(t.column);
}

[[noreturn]] void parse_error(const Token& t, const std::string& what) {
  throw Error(ErrorCode::kParseError, where(t) + ": " + what + " '" + std::string(t.text) + "'",
              t.line);
}

bool parses_as_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

double to_double(const Token& t) {
  std::string_view s = t.text;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) {
    parse_error(t, "expected a number, got");
  }
  return value;
}

// Splits off a leading header row of names, if present.
std::vector<std::string> take_header(std::vector<Row>& rows) {
  std::vector<std::string> names;
  if (rows.empty() || parses_as_number(rows.front().front().text)) return names;
  for (const auto& t : rows.front()) names.emplace_back(t.text);
  rows.erase(rows.begin());
  return names;
}

std::size_t log2_exact(std::size_t n) {
  std::size_t q = 0;
  while ((std::size_t{1} << q) < n) ++q;
  return (std::size_t{1} << q) == n ? q : 0;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

void write_header(std::ostringstream& os, const std::vector<std::string>& names,
                  const std::vector<std::string>& defaults) {
  if (names == defaults) return;
  for (std::size_t i = 0; i < names.size(); ++i) os << (i ? " " : "") << names[i];
  os << '\n';
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

CountTable parse_count_vector(std::string_view text) {
  auto rows = tokenize(text, false);
  auto names = take_header(rows);
  std::vector<std::int64_t> counts;
  for (const auto& row : rows) {
    for (const auto& t : row) {
      std::string_view s = t.text;
      if (!s.empty() && s.front() == '+') s.remove_prefix(1);
      std::int64_t value = 0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
      if (ec != std::errc{} || ptr != s.data() + s.size()) {
        parse_error(t, "expected an integer count, got");
      }
      if (value < 0) {
        throw Error(ErrorCode::kNegativeCount, where(t) + ": negative count " + std::string(s),
                    counts.size());
      }
      counts.push_back(value);
    }
  }
  const std::size_t q = log2_exact(counts.size());
  if (q == 0) {
    throw Error(ErrorCode::kBadLength,
                std::to_string(counts.size()) + " counts is not a power of two >= 2");
  }
  if (!names.empty() && names.size() != q) {
    throw Error(ErrorCode::kParseError,
                "header has " + std::to_string(names.size()) + " names for " +
                    std::to_string(q) + " variables",
                std::size_t{1});
  }
  return CountTable(q, std::move(counts), std::move(names));
}

CountTable read_count_vector(const std::filesystem::path& path) {
  return parse_count_vector(read_text_file(path));
}

CorrelationInput parse_correlation_matrix(std::string_view text) {
  auto rows = tokenize(text, false);
  auto labels = take_header(rows);
  const std::size_t n = rows.size();
  if (n == 0) throw Error(ErrorCode::kParseError, "no matrix rows", std::size_t{1});

  bool full = true;
  bool lower = true;
  for (std::size_t i = 0; i < n; ++i) {
    full = full && rows[i].size() == n;
    lower = lower && rows[i].size() == i + 1;
  }
  if (!full && !lower) {
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n && rows[i].size() != i + 1) {
        parse_error(rows[i].front(), "row " + std::to_string(i + 1) + " has " +
                                         std::to_string(rows[i].size()) +
                                         " entries; row starts with");
      }
    }
    parse_error(rows.back().front(), "rows mix full and lower-triangular layout at");
  }

  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd m(dim, dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      const double v = to_double(rows[i][j]);
      const auto r = static_cast<Eigen::Index>(i), c = static_cast<Eigen::Index>(j);
      m(r, c) = v;
      if (!full) m(c, r) = v;
    }
  }
  if (labels.empty()) labels = default_labels(n);
  if (labels.size() != n) {
    throw Error(ErrorCode::kParseError,
                "header has " + std::to_string(labels.size()) + " labels for a " +
                    std::to_string(n) + "x" + std::to_string(n) + " matrix",
                std::size_t{1});
  }

  CorrelationInput out{SquareMatrix(std::move(m), std::move(labels)), {}};
  const auto& s = out.matrix;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(s(i, i) - 1.0) > kFormatTolerance) {
      throw Error(ErrorCode::kNonUnitDiagonal,
                  "diagonal entry " + s.labels()[i] + " is " + format_double(s(i, i)), i);
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(s(i, j) - s(j, i)) > kFormatTolerance) {
        throw Error(ErrorCode::kAsymmetry,
                    "entries (" + s.labels()[i] + "," + s.labels()[j] + ") and (" +
                        s.labels()[j] + "," + s.labels()[i] + ") differ",
                    i);
      }
      if (std::abs(s(i, j)) > 1.0) {
        out.warnings.push_back("entry (" + s.labels()[i] + "," + s.labels()[j] + ") = " +
                               format_double(s(i, j)) + " lies outside [-1, 1]");
      }
    }
  }
  return out;
}

CorrelationInput read_correlation_matrix(const std::filesystem::path& path) {
  return parse_correlation_matrix(read_text_file(path));
}

CountTable parse_raw_binary(std::string_view text) {
  auto rows = tokenize(text, true);
  auto names = take_header(rows);
  if (rows.empty()) throw Error(ErrorCode::kParseError, "no observations", std::size_t{1});
  const std::size_t q = rows.front().size();
  std::vector<std::int64_t> counts(std::size_t{1} << q, 0);
  for (const auto& row : rows) {
    if (row.size() != q) {
      parse_error(row.front(), "expected " + std::to_string(q) + " values, row starts with");
    }
    std::size_t cell = 0;
    for (std::size_t v = 0; v < q; ++v) {
      const auto& t = row[v];
      if (t.text == "1") {
        cell |= std::size_t{1} << v;
      } else if (t.text != "0") {
        throw Error(ErrorCode::kNonBinaryValue,
                    where(t) + ": expected 0 or 1, got '" + std::string(t.text) + "'", t.line);
      }
    }
    ++counts[cell];
  }
  if (!names.empty() && names.size() != q) {
    throw Error(ErrorCode::kParseError,
                "header has " + std::to_string(names.size()) + " names for " +
                    std::to_string(q) + " columns",
                std::size_t{1});
  }
  return CountTable(q, std::move(counts), std::move(names));
}

CountTable read_raw_binary(const std::filesystem::path& path) {
  return parse_raw_binary(read_text_file(path));
}

std::string format_count_vector(const CountTable& t) {
  std::ostringstream os;
  write_header(os, t.names(), default_variable_names(t.q()));
  for (std::size_t c = 0; c < t.counts().size(); ++c) {
    os << (c ? " " : "") << t.counts()[c];
  }
  os << '\n';
  return os.str();
}

std::string format_correlation_matrix(const SquareMatrix& m) {
  std::ostringstream os;
  write_header(os, m.labels(), default_labels(m.dim()));
  for (std::size_t i = 0; i < m.dim(); ++i) {
    for (std::size_t j = 0; j < m.dim(); ++j) os << (j ? " " : "") << format_double(m(i, j));
    os << '\n';
  }
  return os.str();
}

std::string format_raw_binary(const CountTable& t) {
  std::ostringstream os;
  write_header(os, t.names(), default_variable_names(t.q()));
  for (std::size_t cell = 0; cell < t.counts().size(); ++cell) {
    for (std::int64_t k = 0; k < t.counts()[cell]; ++k) {
      for (std::size_t v = 0; v < t.q(); ++v) os << (v ? "," : "") << level_of(cell, v);
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace startetrad
