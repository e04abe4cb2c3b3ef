#pragma once

// Dense labelled square matrices and the partial inversion operator.
//
// Matrices here are small (dimension below ~64) correlation, concentration
// and joint item/root parameter matrices. Rows and columns carry labels so
// that operations can be addressed by item name ("1".."Q", or "L" for the
// latent root) rather than by position.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace startetrad {

using Label = std::string;

// Labels "1", "2", ..., "dim".
std::vector<Label> default_labels(std::size_t dim);

class SquareMatrix {
 public:
  explicit SquareMatrix(Eigen::MatrixXd values);
  SquareMatrix(Eigen::MatrixXd values, std::vector<Label> labels);

  static SquareMatrix identity(std::size_t dim);
  static SquareMatrix identity(std::vector<Label> labels);

  std::size_t dim() const noexcept { return labels_.size(); }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  const std::vector<Label>& labels() const noexcept { return labels_; }

  double operator()(std::size_t i, std::size_t j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  double at(std::string_view row, std::string_view col) const;

  // Throws Error{kUnknownLabel}.
  std::size_t index_of(std::string_view label) const;
  bool has_label(std::string_view label) const noexcept;

  bool is_symmetric(double tol = 0.0) const;
  bool has_unit_diagonal(double tol = 0.0) const;
  double max_abs() const;

 private:
  Eigen::MatrixXd values_;
  std::vector<Label> labels_;
};

// Largest entrywise absolute difference. Dimensions must agree.
double max_abs_diff(const SquareMatrix& a, const SquareMatrix& b);
double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct PartialInversionResult {
  SquareMatrix matrix;
  std::vector<Label> inverted_set;
};

// Pivots with |s| <= kPivotTolerance * max|M| are rejected.
inline constexpr double kPivotTolerance = 1e-12;
// invert() refuses matrices whose reciprocal condition estimate is below
// 1 / kConditionBound.
inline constexpr double kConditionBound = 1e12;

// Partial inversion on the index set `set`. For a single index k with pivot
// s = M(k,k), entries not in row/column k become m_ij - m_ik m_kj / s, the
// column k becomes m_ik / s, the row k becomes -m_kj / s and the pivot 1/s.
// The operator is applied index by index in the order the labels appear in
// `set`; the result does not depend on that order. Applying it twice on the
// same set restores M.
//
// Throws Error{kUnknownLabel} for labels not in M, Error{kSingularPivot}
// (with the offending position) when a pivot falls below tolerance.
PartialInversionResult partial_invert(const SquareMatrix& m,
                                      const std::vector<Label>& set,
                                      double pivot_tolerance = kPivotTolerance);

// Full inverse by LU with partial pivoting. Labels are kept.
// Throws Error{kSingularMatrix}.
SquareMatrix invert(const SquareMatrix& m);

// Rows/columns restricted to `keep`, in the original label order.
SquareMatrix principal_submatrix(const SquareMatrix& m,
                                 const std::vector<Label>& keep);

struct RankOneResult {
  Eigen::VectorXd delta;     // diagonal deflation, delta_ii = 1 - lambda_i^2
  Eigen::VectorXd loadings;  // leading factor of the deflated matrix
  double residual = 0.0;     // max-abs of (P - diag(delta)) - lambda lambda^T
  bool delta_in_unit_interval = false;  // 0 < delta_ii < 1 for every i
  int iterations = 0;
  bool converged = false;
};

// Fits P - diag(delta) to rank one by fixed-point iteration on the
// communalities (at most 200 sweeps, stop when no delta moves by more
// than 1e-10), then reports the residual against the leading eigenpair.
RankOneResult rank_one_residual(const SquareMatrix& p);

}  // namespace startetrad
