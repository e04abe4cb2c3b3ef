#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "startetrad/error.hpp"
#include "startetrad/gaussian_star.hpp"
#include "startetrad/io.hpp"
#include "test_support.hpp"

namespace startetrad {
namespace {

TEST(ClassifyLoading, Categories) {
  EXPECT_EQ(classify_loading(0.5), LoadingStatus::kProper);
  EXPECT_EQ(classify_loading(1.0), LoadingStatus::kBoundary);
  EXPECT_EQ(classify_loading(1.0 - 1e-12), LoadingStatus::kBoundary);
  EXPECT_EQ(classify_loading(0.0), LoadingStatus::kBoundary);
  EXPECT_EQ(classify_loading(1.2), LoadingStatus::kHeywood);
  EXPECT_EQ(classify_loading(-0.3), LoadingStatus::kHeywood);
  EXPECT_EQ(classify_loading(std::nan("")), LoadingStatus::kHeywood);
}

TEST(Loadings, NeedThreeItems) {
  try {
    Loadings({0.5, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionTooSmall);
  }
}

TEST(BuildCorrelation, OffDiagonalsAreProducts) {
  const Loadings l({0.9, 0.8, 0.7});
  const auto p = build_correlation(l);
  EXPECT_DOUBLE_EQ(p(0, 0), 1.0);
  EXPECT_NEAR(p(0, 1), 0.72, 1e-15);
  EXPECT_NEAR(p(1, 2), 0.56, 1e-15);
}

TEST(BuildConcentration, MatchesInverse) {
  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> v;
    for (int i = 0; i < 3 + rep % 4; ++i) v.push_back(testing::uniform(gen, 0.05, 0.95));
    const Loadings l(v);
    const auto k = build_concentration(l);
    EXPECT_LT(max_abs_diff(k.values(), build_correlation(l).values().inverse()), 1e-9);
  }
  EXPECT_THROW(build_concentration(Loadings({1.2, 0.5, 0.5})), Error);
}

TEST(BuildJointCorrelation, RootLast) {
  const auto psi = build_joint_correlation(Loadings({0.9, 0.8, 0.7}));
  ASSERT_EQ(psi.dim(), 4u);
  EXPECT_EQ(psi.labels().back(), "L");
  EXPECT_DOUBLE_EQ(psi.at("2", "L"), 0.8);
}

TEST(FitLoadingsTriple, ExactTriple) {
  const auto l = fit_loadings_triple(0.72, 0.63, 0.56);
  EXPECT_NEAR(l[0], 0.9, 1e-12);
  EXPECT_NEAR(l[1], 0.8, 1e-12);
  EXPECT_NEAR(l[2], 0.7, 1e-12);
  EXPECT_TRUE(l.all_proper());
}

TEST(FitLoadingsTriple, HeywoodCases) {
  const auto boundary = fit_loadings_triple(0.40, 0.50, 0.20);
  EXPECT_NEAR(boundary[0], 1.0, 1e-12);
  EXPECT_EQ(boundary.status()[0], LoadingStatus::kBoundary);

  const auto above = fit_loadings_triple(0.60, 0.50, 0.10);
  EXPECT_NEAR(above[0], std::sqrt(3.0), 1e-12);
  EXPECT_EQ(above.overall(), LoadingStatus::kHeywood);

  const auto negative = fit_loadings_triple(-0.3, 0.4, 0.5);
  EXPECT_TRUE(std::isnan(negative[0]));
  EXPECT_EQ(negative.overall(), LoadingStatus::kHeywood);
}

TEST(FitLoadingsTriple, ZeroDenominator) {
  try {
    fit_loadings_triple(0.4, 0.5, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroDenominator);
  }
}

TEST(FitLoadings, RecoversExactLoadings) {
  std::mt19937_64 gen(5);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> v;
    for (int i = 0; i < 4 + rep % 3; ++i) v.push_back(testing::uniform(gen, 0.2, 0.9));
    const auto fit = fit_loadings(build_correlation(Loadings(v)));
    EXPECT_TRUE(fit.converged);
    EXPECT_LT(fit.max_offdiag_residual, 1e-9);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(fit.loadings[i], v[i], 1e-8);
  }
}

TEST(FitLoadings, HeywoodOptimum) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(4, 4, 0.64);
  p.row(0).setConstant(0.84);
  p.col(0).setConstant(0.84);
  p.diagonal().setOnes();
  const auto fit = fit_loadings(SquareMatrix(p));
  EXPECT_NEAR(fit.loadings[0], 1.05, 1e-8);
  EXPECT_EQ(fit.loadings.overall(), LoadingStatus::kHeywood);
}

TEST(FitLoadings, RoundedDepressionMatrix) {
  const auto in = read_correlation_matrix(testing::data_path("depression_rounded.corr"));
  const auto fit = fit_loadings(in.matrix);
  const double expected[] = {0.76, 0.77, 0.74, 0.76};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(fit.loadings[i], expected[i], 0.02);
}

TEST(FitLoadings, Preconditions) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(4, 4, 0.3);
  p(0, 1) = p(1, 0) = -0.1;
  p.diagonal().setOnes();
  try {
    fit_loadings(SquareMatrix(p));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNegativeCorrelation);
  }
  EXPECT_THROW(fit_loadings(SquareMatrix::identity(2)), Error);
}

}  // namespace
}  // namespace startetrad
