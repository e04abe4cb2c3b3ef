#pragma once

// Star-graph generators: exact joint tables for a binary root and items,
// and seeded samples for binary and Gaussian models.
//
// Random streams: one std::mt19937_64 per call, seeded with `seed`. Uniforms
// are the top 53 bits of a draw scaled to [0, 1). A binary observation uses
// one uniform for the root followed by one per item, in item order. A
// Gaussian observation uses one normal for the root followed by one per
// item; each normal takes two uniforms (Box-Muller, cosine branch). The
// outputs are therefore identical on every platform.

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "startetrad/gaussian_star.hpp"
#include "startetrad/matrix.hpp"
#include "startetrad/tables.hpp"

namespace startetrad {

struct BinaryStarModel {
  double root_prior = 0.5;  // Pr(L = 1)
  // Per item: (Pr(X_i = 1 | L = 0), Pr(X_i = 1 | L = 1)).
  std::vector<std::pair<double, double>> succ_given_root;

  std::size_t q() const noexcept { return succ_given_root.size(); }
  // Throws Error{kInvalidArgument} for probabilities outside [0, 1] or no items.
  void validate() const;
  // Pr(X_i = 1 | L = 1) > Pr(X_i = 1 | L = 0) for every item.
  bool positive_dependence() const noexcept;
};

struct GaussianStarModel {
  Loadings loadings;
};

struct ExactTables {
  ProbTable joint;   // items first, root last
  ProbTable leaves;  // root summed out
};

ExactTables exact_tables(const BinaryStarModel& model);

// Correlation of each item with the root, from the exact (item, root) margin.
// Throws Error{kDegenerateMargin} when the root or an item is degenerate.
std::vector<double> item_root_correlations(const BinaryStarModel& model);

// n independent observations. Throws Error{kInvalidArgument} for n < 1.
CountTable sample(const BinaryStarModel& model, std::int64_t n, std::uint64_t seed);

// n x q data matrix, X_i = lambda_i L + sqrt(1 - lambda_i^2) e_i.
// Throws Error{kImproperLoadings} unless every loading is proper.
Eigen::MatrixXd sample_gaussian(const GaussianStarModel& model, std::size_t n,
                                std::uint64_t seed);

// Pearson correlation matrix of the columns.
SquareMatrix sample_correlation(const Eigen::MatrixXd& data);

}  // namespace startetrad
