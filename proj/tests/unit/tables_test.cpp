#include <gtest/gtest.h>

#include <random>

#include "startetrad/error.hpp"
#include "startetrad/io.hpp"
#include "startetrad/simulator.hpp"
#include "startetrad/tables.hpp"
#include "test_support.hpp"

namespace startetrad {
namespace {

CountTable load(const std::string& name) {
  return read_count_vector(testing::data_path(name));
}

TEST(CountTable, Validation) {
  EXPECT_THROW(CountTable(2, {1, 2, 3}), Error);
  try {
    CountTable(1, {1, -1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNegativeCount);
  }
  EXPECT_THROW(CountTable(1, {0, 0}), Error);
}

TEST(CountTable, LevelsAndMargins) {
  const auto t = load("eph.counts");
  EXPECT_EQ(t.total(), 4649);
  EXPECT_EQ(t.at({1, 0, 0}), 78);
  EXPECT_EQ(t.at({0, 0, 1}), 1012);
  const auto ph = t.margin({1, 2});
  EXPECT_EQ(ph.names()[0], "P");
  EXPECT_EQ(ph.counts()[0], 3299 + 78);
  EXPECT_EQ(ph.total(), t.total());
}

TEST(CountTable, MarginsSumToTotal) {
  const auto t = load("depression.counts");
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) EXPECT_EQ(t.margin({i, j}).total(), 1008);
}

TEST(PhiCorrelation, ThreeFormsAgree) {
  std::mt19937_64 gen(23);
  for (int rep = 0; rep < 1000; ++rep) {
    Table2x2 t;
    for (auto& c : t.cells) c = testing::uniform(gen, 0.01, 1.0);
    const auto phi = phi_correlation(t);
    EXPECT_NEAR(phi.cross_product, phi.covariance, 1e-12);
    EXPECT_NEAR(phi.determinant, phi.covariance, 1e-12);
  }
}

TEST(PhiCorrelation, ZeroIffOddsRatioOne) {
  Table2x2 t{{0.2 * 0.3, 0.8 * 0.3, 0.2 * 0.7, 0.8 * 0.7}};
  EXPECT_NEAR(phi_correlation(t).value(), 0.0, 1e-15);
  Table2x2 degenerate{{1, 1, 0, 0}};
  try {
    phi_correlation(degenerate);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateMargin);
  }
}

TEST(Eph, CorrelationsAndOddsRatios) {
  const auto t = load("eph.counts");
  const auto r = correlation_matrix(t);
  EXPECT_NEAR(r(0, 1), 0.12893127, 1e-7);
  EXPECT_NEAR(r(0, 2), 0.10800707, 1e-7);
  EXPECT_NEAR(r(1, 2), 0.07103078, 1e-7);
  EXPECT_NEAR(odds_ratio(t, 0, 1), 5.4812, 1e-4);
  EXPECT_NEAR(odds_ratio(t, 0, 2), 3.0043, 1e-4);
  EXPECT_NEAR(odds_ratio(t, 1, 2), 2.0461, 1e-4);
  EXPECT_NEAR(odds_ratio(t, 0, 1, {{2, 0}}), 4.34807, 1e-5);
  EXPECT_NEAR(odds_ratio(t, 0, 1, {{2, 1}}), 5.10027, 1e-5);
  EXPECT_NEAR(odds_ratio(t, 1, 2, {{0, 1}}), 2.07273, 1e-5);
  EXPECT_TRUE(q3_star_conditions(t).pass);
}

TEST(Eph, Mtp2BorderlineSlice) {
  const auto v = mtp2_check(load("eph.counts"), false);
  EXPECT_TRUE(v.pass);
  int borderline = 0;
  for (const auto& c : v.checks) {
    if (c.borderline) {
      ++borderline;
      EXPECT_EQ(c.i, 1u);
      EXPECT_EQ(c.j, 2u);
      EXPECT_EQ(c.given.front().second, 1);
    }
  }
  EXPECT_EQ(borderline, 1);
}

TEST(Depression, StudentizedInteractions) {
  const auto t = load("depression.counts");
  const auto triple = t.margin({0, 1, 2});
  const auto terms = studentized_interactions(triple).terms;
  ASSERT_EQ(terms.size(), 4u);
  EXPECT_NEAR(terms[0].studentized, 10.74, 0.01);
  EXPECT_NEAR(terms[1].studentized, 7.59, 0.01);
  EXPECT_NEAR(terms[2].studentized, 10.31, 0.01);
  EXPECT_NEAR(terms[3].studentized, -3.38, 0.01);
  EXPECT_NEAR(terms[3].standard_error * 8.0 * terms[3].standard_error * 8.0,
              [&] {
                double s = 0;
                for (auto n : triple.counts()) s += 1.0 / static_cast<double>(n);
                return s;
              }(),
              1e-12);
}

TEST(Depression, RelativeRisksAndConditionalOddsRatios) {
  const auto t = load("depression.counts");
  const auto rr = conditional_relative_risks(t.margin({0, 1, 2}));
  EXPECT_NEAR(rr.first, 5.86, 0.01);
  EXPECT_NEAR(rr.second, 1.47, 0.01);
  EXPECT_NEAR(odds_ratio(t, 0, 1, {{2, 0}, {3, 0}}), 12.58, 0.01);
  EXPECT_NEAR(odds_ratio(t, 0, 1, {{2, 1}, {3, 1}}), 5.95, 0.01);
}

TEST(OddsRatio, ZeroCellAndContinuityCorrection) {
  const CountTable t(2, {10, 0, 5, 5});
  try {
    odds_ratio(t, 0, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroCell);
  }
  EXPECT_NEAR(odds_ratio(t, 0, 1, {}, true), 10.5 * 5.5 / (0.5 * 5.5), 1e-12);
  EXPECT_THROW(odds_ratio(t, 0, 0), Error);
}

TEST(StarConditions, RecodingFlipsAPair) {
  const auto t = load("eph.counts");
  std::vector<std::int64_t> flipped(8);
  for (std::size_t c = 0; c < 8; ++c) flipped[c ^ 1U] = t.counts()[c];
  EXPECT_FALSE(q3_star_conditions(CountTable(3, flipped)).pass);
}

TEST(StarConditions, ExactStarIsStrict) {
  const BinaryStarModel m{0.4, {{0.1, 0.7}, {0.2, 0.9}, {0.3, 0.6}}};
  const auto v = q3_star_conditions(star_marginal(m).second);
  EXPECT_TRUE(v.pass);
  for (const auto& s : v.slacks) EXPECT_GT(s.slack, 0.0);
  EXPECT_TRUE(mtp2_check(star_marginal(m).second, true).pass);
}

TEST(Mtp2, IndependenceIsNotStrict) {
  std::vector<double> p(8);
  for (std::size_t c = 0; c < 8; ++c) {
    p[c] = (level_of(c, 0) ? 0.3 : 0.7) * (level_of(c, 1) ? 0.4 : 0.6) *
           (level_of(c, 2) ? 0.5 : 0.5);
  }
  const ProbTable t(3, p);
  EXPECT_TRUE(mtp2_check(t, false).pass);
  EXPECT_FALSE(mtp2_check(t, true).pass);
  const CountTable empty(3, {1, 1, 1, 1, 0, 0, 0, 0});
  try {
    mtp2_check(empty, false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptySlice);
  }
}

TEST(PairwiseMargins, MarginalAndConditionalOddsRatios) {
  const auto full = load("margins_full.counts");
  EXPECT_NEAR(odds_ratio(load("margins_ab.counts"), 0, 1), 4.10939, 1e-5);
  EXPECT_NEAR(odds_ratio(load("margins_ac.counts"), 0, 1), 7.75309, 1e-5);
  EXPECT_NEAR(odds_ratio(load("margins_bc.counts"), 0, 1), 1.34884, 1e-5);
  EXPECT_NEAR(odds_ratio(full, 0, 1, {{2, 0}}), 0.12746, 1e-5);
  EXPECT_NEAR(odds_ratio(full, 0, 1, {{2, 1}}), 53.10222, 1e-5);
}

TEST(Reconstruct, PairwiseMarginCells) {
  // Inclusion-exclusion in exact rational arithmetic.
  const double expected[] = {0.09144102178812923, 0.010831705484598046, 0.1471953418482344,
                             0.08235011269722013, 0.08355897821187078, 0.08235011269722013,
                             0.08235011269722013, 0.4199226145755071};
  const auto ms = MarginSystem::from_counts(load("margins_ab.counts"), load("margins_ac.counts"),
                                            load("margins_bc.counts"));
  const auto cells = reconstruct_cells(ms);
  for (std::size_t c = 0; c < 8; ++c) EXPECT_NEAR(cells[c], expected[c], 1e-14);
  EXPECT_TRUE(std::holds_alternative<ProbTable>(reconstruct_from_pairwise(ms)));
}

TEST(Reconstruct, InconsistentMargins) {
  const auto ms = MarginSystem::from_counts(CountTable(2, {10, 10, 10, 10}),
                                            CountTable(2, {5, 15, 10, 10}),
                                            CountTable(2, {10, 10, 10, 10}));
  try {
    reconstruct_cells(ms);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInconsistentMargins);
  }
}

TEST(Reconstruct, InfeasibleCertificate) {
  // Strong pairwise associations force a negative cell.
  const auto ms = MarginSystem::from_counts(CountTable(2, {45, 5, 5, 45}),
                                            CountTable(2, {45, 5, 5, 45}),
                                            CountTable(2, {5, 45, 45, 5}));
  const auto r = reconstruct_from_pairwise(ms);
  ASSERT_TRUE(std::holds_alternative<InfeasibilityCertificate>(r));
  EXPECT_FALSE(std::get<InfeasibilityCertificate>(r).negative_cells.empty());
}

// A joint with zero third central moment: shift the product of independent
// margins by pairwise terms that leave E[(X1-m1)(X2-m2)(X3-m3)] at zero.
TEST(Reconstruct, RoundTripsZeroThirdMoment) {
  std::mt19937_64 gen(29);
  int checked = 0;
  for (int rep = 0; rep < 500; ++rep) {
    const double m[3] = {testing::uniform(gen, 0.2, 0.8), testing::uniform(gen, 0.2, 0.8),
                         testing::uniform(gen, 0.2, 0.8)};
    const double c[3] = {testing::uniform(gen, -0.03, 0.03), testing::uniform(gen, -0.03, 0.03),
                         testing::uniform(gen, -0.03, 0.03)};  // cov 12, 13, 23
    std::vector<double> p(8);
    bool ok = true;
    for (std::size_t cell = 0; cell < 8; ++cell) {
      double d[3], base = 1.0;
      for (std::size_t v = 0; v < 3; ++v) {
        const int x = level_of(cell, v);
        base *= x ? m[v] : 1.0 - m[v];
        d[v] = (x - m[v]) / (m[v] * (1 - m[v]));
      }
      p[cell] = base * (1.0 + c[0] * d[0] * d[1] + c[1] * d[0] * d[2] + c[2] * d[1] * d[2]);
      ok = ok && p[cell] > 0.0;
    }
    if (!ok) continue;
    double sum = 0;
    for (double x : p) sum += x;
    for (double& x : p) x /= sum;
    const ProbTable joint(3, p);
    const auto back = std::get<ProbTable>(reconstruct_from_pairwise(MarginSystem::from_joint(joint)));
    for (std::size_t cell = 0; cell < 8; ++cell) EXPECT_NEAR(back.probs()[cell], p[cell], 1e-12);
    ++checked;
  }
  EXPECT_GT(checked, 400);
}

}  // namespace
}  // namespace startetrad
