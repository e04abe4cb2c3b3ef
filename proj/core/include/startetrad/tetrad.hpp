#pragma once

// Condition battery on observed item correlations: vanishing tetrads,
// complete M-matrix concentrations, partial correlations, and the combined
// verdict on whether a star graph with proper positive loadings could have
// generated the matrix.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "startetrad/gaussian_star.hpp"
#include "startetrad/matrix.hpp"

namespace startetrad {

inline constexpr double kExactTolerance = 1e-8;
inline constexpr double kStatisticalTolerance = 0.05;

struct TetradResidual {
  // Positions (i, j, h, k); value = s_ih s_jk - s_jh s_ik.
  std::array<std::size_t, 4> indices{};
  double value = 0.0;
};

struct TetradReport {
  std::vector<TetradResidual> residuals;
  double max_abs_residual = 0.0;
  double tolerance = 0.0;
  bool is_tetrad = false;
  bool all_positive = false;  // 0 < s_ij < 1 for every off-diagonal entry
};

// Every distinct tetrad difference, 3 * C(Q, 4) of them. Quadruples
// a < b < c < d are visited lexicographically; for each the residuals
// (a,b | c,d), (a,c | b,d), (a,d | b,c) are listed, where (i,j | h,k)
// denotes s_ih s_jk - s_jh s_ik.
// Throws Error{kDimensionTooSmall} for Q < 4, Error{kAsymmetry} when S is
// not symmetric.
TetradReport tetrad_check(const SquareMatrix& s, double tolerance = kExactTolerance);

struct MMatrixVerdict {
  bool pass = false;
  bool strict = true;
  bool diagonal_positive = false;
  double max_offdiagonal = 0.0;  // largest off-diagonal entry
  double tolerance = 0.0;
  // Off-diagonal positions (row < col) that break the sign condition.
  std::vector<std::array<std::size_t, 2>> violations;
};

// Positive diagonal and off-diagonals < -tol (strict) or <= tol (general
// MTP2 analogue, where zeros are allowed).
MMatrixVerdict m_matrix_check(const SquareMatrix& k, bool strict,
                              double tolerance = 1e-12);

// rho_ij.rest = -k_ij / sqrt(k_ii k_jj) with K = P^{-1}; unit diagonal.
SquareMatrix partial_correlations_given_rest(const SquareMatrix& p);

// Partial correlation of i and j given exactly the items in `given`,
// computed on the principal submatrix over {i, j} and `given`.
// Throws Error{kLabelClash} when i == j or either appears in `given`.
double partial_correlation_subset(const SquareMatrix& p, const Label& i,
                                  const Label& j, const std::vector<Label>& given);

enum class BatteryMode { kGaussian, kBinary };
enum class Conclusion { kConsistent, kInconsistent, kHeywood };

std::string_view to_string(BatteryMode mode);
std::string_view to_string(Conclusion conclusion);

struct Witness {
  std::vector<Label> items;
  double value = 0.0;
  std::string note;
};

struct ConditionVerdict {
  std::string id;           // stable identifier, e.g. "concentration_m_matrix"
  std::string description;
  bool pass = false;            // at the tolerance selected for judgement
  bool pass_exact = false;      // at the exact tolerance
  bool pass_statistical = false;
  double statistic = 0.0;       // the residual or margin the verdict rests on
  double tolerance = 0.0;       // the tolerance `pass` was judged against
  std::vector<Witness> witnesses;
};

struct BatteryOptions {
  double tol_exact = kExactTolerance;
  double tol_stat = kStatisticalTolerance;
  // Judge against tol_stat (observed data) rather than tol_exact.
  bool statistical = false;
};

struct ConditionBattery {
  BatteryMode mode = BatteryMode::kGaussian;
  std::size_t q = 0;
  bool necessary_only = false;
  double tolerance = 0.0;
  std::vector<ConditionVerdict> conditions;
  std::vector<std::string> notes;
  Conclusion overall = Conclusion::kInconsistent;

  std::optional<TetradReport> correlation_tetrads;
  std::optional<TetradReport> partial_tetrads;
  std::optional<MMatrixVerdict> concentration_sign;
  std::optional<RankOneResult> rank_one;
  std::optional<Loadings> loadings;
  std::optional<SquareMatrix> partials;

  const ConditionVerdict* find(std::string_view id) const;
  std::vector<const ConditionVerdict*> failing() const;
};

// Gaussian mode evaluates the observable equivalent conditions for a star
// graph with proper positive loadings; binary mode evaluates the two
// correlation conditions that are necessary for a binary root. For Q = 3 the
// tetrad conditions are skipped: the closed-form loadings and positivity of
// every subset partial correlation are checked instead.
ConditionBattery condition_battery(const SquareMatrix& p, BatteryMode mode,
                                     const BatteryOptions& options = {});

}  // namespace startetrad
