#pragma once

// Gaussian one-factor (star) model: loadings to correlation and
// concentration matrices, and fitting loadings back from correlations.

#include <cstddef>
#include <string_view>
#include <vector>

#include "startetrad/matrix.hpp"

namespace startetrad {

enum class LoadingStatus { kProper, kBoundary, kHeywood };

std::string_view to_string(LoadingStatus status);

// Estimates at or above 1 - kBoundaryTolerance are no longer proper.
inline constexpr double kBoundaryTolerance = 1e-9;
inline constexpr double kZeroLoadingTolerance = 1e-12;

// Proper: 0 < v < 1. Boundary: v == 0 or v == 1 (within tolerance).
// Heywood: v > 1, negative, or NaN (a squared loading from a negative
// ratio has no real root).
LoadingStatus classify_loading(double value);

// Item-root correlations rho_iL, one per item.
class Loadings {
 public:
  // Statuses are derived with classify_loading. Throws for fewer than 3.
  explicit Loadings(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<LoadingStatus>& status() const noexcept { return status_; }

  bool all_proper() const noexcept;
  // Worst status over all entries (Heywood > Boundary > Proper).
  LoadingStatus overall() const noexcept;

 private:
  std::vector<double> values_;
  std::vector<LoadingStatus> status_;
};

struct FactorFit {
  Loadings loadings;
  SquareMatrix fitted_correlations;
  double max_offdiag_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// P = Delta + lambda lambda^T: unit diagonal, off-diagonals lambda_i lambda_j.
SquareMatrix build_correlation(const Loadings& lambda);

// P^{-1} = Delta^{-1} - delta delta^T with delta_i = -lambda_i / (sqrt(s)(1 -
// lambda_i^2)) and s = 1 + sum lambda_i^2 / (1 - lambda_i^2).
// Throws Error{kImproperLoadings} unless every 0 < lambda_i < 1.
SquareMatrix build_concentration(const Loadings& lambda);

// The joint correlation matrix of the items and the root, root last and
// labelled "L".
SquareMatrix build_joint_correlation(const Loadings& lambda);

// Closed-form three-item solution:
//   rho_1L = sqrt(r12 r13 / r23), rho_2L = sqrt(r12 r23 / r13),
//   rho_3L = sqrt(r13 r23 / r12).
// Throws Error{kZeroDenominator} when any |r| < 1e-12.
Loadings fit_loadings_triple(double r12, double r13, double r23);

// Per-item geometric mean of the closed-form estimate over all triples
// containing the item. Requires positive off-diagonals.
std::vector<double> triad_mean_loadings(const SquareMatrix& p);

// Unweighted least squares on the off-diagonals, sum_{i<j} (P_ij -
// lambda_i lambda_j)^2, by BFGS from the triad mean start. Stops when the
// gradient max-abs is below 1e-10 or after 500 iterations.
// Throws Error{kNegativeCorrelation} when any off-diagonal is <= 0,
// Error{kDimensionTooSmall} for Q < 3.
FactorFit fit_loadings(const SquareMatrix& p);

}  // namespace startetrad
