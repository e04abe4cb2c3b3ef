#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "startetrad/error.hpp"
#include "startetrad/io.hpp"
#include "test_support.hpp"

namespace startetrad {
namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(CountVector, BundledFiles) {
  const auto eph = read_count_vector(testing::data_path("eph.counts"));
  EXPECT_EQ(eph.q(), 3u);
  EXPECT_EQ(eph.total(), 4649);
  EXPECT_EQ(eph.names(), (std::vector<std::string>{"E", "P", "H"}));
  const auto dep = read_count_vector(testing::data_path("depression.counts"));
  EXPECT_EQ(dep.q(), 4u);
  EXPECT_EQ(dep.total(), 1008);
  EXPECT_EQ(dep.names()[3], "V4");
}

TEST(CountVector, Errors) {
  EXPECT_EQ(code_of([] { parse_count_vector("1 2 3"); }), ErrorCode::kBadLength);
  EXPECT_EQ(code_of([] { parse_count_vector("1 -2 3 4"); }), ErrorCode::kNegativeCount);
  try {
    parse_count_vector("# comment\n1 2\n3 x4\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_EQ(e.index(), 3u);
    EXPECT_NE(std::string(e.what()).find("column 3"), std::string::npos);
  }
  EXPECT_EQ(code_of([] { parse_count_vector("A B C\n1 2 3 4"); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { read_count_vector("/nonexistent/file.counts"); }), ErrorCode::kIo);
}

TEST(CorrelationMatrix, LowerTriangleAndFull) {
  const auto lower = parse_correlation_matrix("1\n0.5 1\n0.4 0.3 1\n");
  const auto full = parse_correlation_matrix("1 0.5 0.4\n0.5 1 0.3\n0.4 0.3 1\n");
  EXPECT_EQ(max_abs_diff(lower.matrix, full.matrix), 0.0);
  EXPECT_DOUBLE_EQ(lower.matrix(0, 2), 0.4);
  const auto rounded = read_correlation_matrix(testing::data_path("depression_rounded.corr"));
  EXPECT_EQ(rounded.matrix.dim(), 4u);
  EXPECT_TRUE(rounded.warnings.empty());
}

TEST(CorrelationMatrix, Validation) {
  EXPECT_EQ(code_of([] { parse_correlation_matrix("1 0.5\n0.4 1\n"); }), ErrorCode::kAsymmetry);
  EXPECT_EQ(code_of([] { parse_correlation_matrix("1 0.5\n0.5 0.9\n"); }),
            ErrorCode::kNonUnitDiagonal);
  EXPECT_EQ(code_of([] { parse_correlation_matrix("1 0.5\n0.5\n"); }), ErrorCode::kParseError);
  const auto warned = parse_correlation_matrix("1 1.2 0.3\n1.2 1 0.3\n0.3 0.3 1\n");
  EXPECT_EQ(warned.warnings.size(), 1u);
}

TEST(CorrelationMatrix, HeaderLabels) {
  const auto in = parse_correlation_matrix("a b\n1 0.2\n0.2 1\n");
  EXPECT_EQ(in.matrix.labels()[1], "b");
}

TEST(RawBinary, AggregatesRows) {
  const auto t = parse_raw_binary("0,0,0\n1 0 0\n0,1,0\n1,1,0\n0,0,1\n1,0,1\n0,1,1\n1,1,1\n");
  EXPECT_EQ(t.q(), 3u);
  EXPECT_EQ(t.total(), 8);
  for (auto c : t.counts()) EXPECT_EQ(c, 1);
  EXPECT_EQ(code_of([] { parse_raw_binary("0,1\n2,1\n"); }), ErrorCode::kNonBinaryValue);
  EXPECT_EQ(code_of([] { parse_raw_binary("0,1\n1\n"); }), ErrorCode::kParseError);
}

TEST(RoundTrip, EveryFormat) {
  std::mt19937_64 gen(37);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t q = 1 + rep % 4;
    std::vector<std::int64_t> counts(std::size_t{1} << q);
    for (auto& c : counts) c = static_cast<std::int64_t>(gen() % 20);
    counts[0] += 1;
    std::vector<std::string> names;
    if (rep % 2) {
      for (std::size_t i = 0; i < q; ++i) names.push_back("item" + std::to_string(i));
    }
    const CountTable t(q, counts, names);
    EXPECT_EQ(parse_count_vector(format_count_vector(t)), t);
    EXPECT_EQ(parse_raw_binary(format_raw_binary(t)), t);

    const auto m = testing::random_spd(gen, 2 + rep % 5);
    const Eigen::VectorXd d = m.values().diagonal().cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd r = d.asDiagonal() * m.values() * d.asDiagonal();
    r = 0.5 * (r + r.transpose());
    r.diagonal().setOnes();
    const SquareMatrix corr(r);
    EXPECT_EQ(max_abs_diff(parse_correlation_matrix(format_correlation_matrix(corr)).matrix, corr),
              0.0);
  }
}

TEST(Files, WriteThenRead) {
  const auto path = std::filesystem::temp_directory_path() / "startetrad_io_test.counts";
  const CountTable t(2, {3, 1, 4, 1}, {"A", "B"});
  write_text_file(path, format_count_vector(t));
  EXPECT_EQ(read_count_vector(path), t);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace startetrad
