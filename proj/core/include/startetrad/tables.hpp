#pragma once

// Binary contingency tables.
//
// Cells are stored in the conventional count-vector order: levels go from 0
// to 1 and the first variable changes fastest, so cell index
// sum_v level_v * 2^v. For three variables the order is
// 000, 100, 010, 110, 001, 101, 011, 111 (levels listed as A B C).

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "startetrad/matrix.hpp"

namespace startetrad {

struct BinaryStarModel;

// Names "V1", ..., "Vq".
std::vector<std::string> default_variable_names(std::size_t q);

// Level of variable `var` in cell `cell`.
inline int level_of(std::size_t cell, std::size_t var) {
  return static_cast<int>((cell >> var) & 1U);
}

class CountTable {
 public:
  // Throws Error{kBadLength} unless counts.size() == 2^q,
  // Error{kNegativeCount} for a negative cell, Error{kInvalidArgument} for a
  // zero total or a name list of the wrong length.
  CountTable(std::size_t q, std::vector<std::int64_t> counts,
             std::vector<std::string> names = {});

  std::size_t q() const noexcept { return q_; }
  const std::vector<std::int64_t>& counts() const noexcept { return counts_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::int64_t total() const noexcept { return total_; }
  std::int64_t at(const std::vector<int>& levels) const;

  // Table over `vars` (in the listed order), summing out the rest.
  CountTable margin(const std::vector<std::size_t>& vars) const;

  friend bool operator==(const CountTable&, const CountTable&) = default;

 private:
  std::size_t q_;
  std::vector<std::int64_t> counts_;
  std::vector<std::string> names_;
  std::int64_t total_ = 0;
};

class ProbTable {
 public:
  // Entries must be >= 0 and sum to 1 within 1e-12.
  ProbTable(std::size_t q, std::vector<double> probs,
            std::vector<std::string> names = {});
  static ProbTable from_counts(const CountTable& counts);

  std::size_t q() const noexcept { return q_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  double at(const std::vector<int>& levels) const;

  ProbTable margin(const std::vector<std::size_t>& vars) const;

 private:
  std::size_t q_;
  std::vector<double> probs_;
  std::vector<std::string> names_;
};

// 2x2 table in count-vector order: (0,0), (1,0), (0,1), (1,1), first index
// for the row variable.
struct Table2x2 {
  std::array<double, 4> cells{};
  double at(int a, int b) const { return cells[static_cast<std::size_t>(a + 2 * b)]; }
};

Table2x2 to_2x2(const CountTable& t);
Table2x2 to_2x2(const ProbTable& t);

struct PhiCorrelation {
  double cross_product = 0.0;  // (p00 p11 - p10 p01) / kappa
  double covariance = 0.0;     // (p11 - p1+ p+1) / kappa
  double determinant = 0.0;    // det(pi_A^{-1/2} pi_AB pi_B^{-1/2})
  double value() const { return covariance; }
};

// Pearson correlation of two binary variables, by the three equivalent
// formulas. Throws Error{kDegenerateMargin} when a row or column sum is 0.
PhiCorrelation phi_correlation(const Table2x2& t);

// Pairwise phi correlations, labelled with the table's variable names.
SquareMatrix correlation_matrix(const CountTable& t);
SquareMatrix correlation_matrix(const ProbTable& t);

// Fixed levels of conditioning variables; variables neither in the pair nor
// listed here are summed out.
using LevelAssignment = std::vector<std::pair<std::size_t, int>>;

// Cross-product ratio of the (i, j) table at the given levels of the
// conditioning variables. With `continuity_correction` 0.5 is added to each of
// the four cells; otherwise a zero cell throws Error{kZeroCell}.
double odds_ratio(const CountTable& t, std::size_t i, std::size_t j,
                  const LevelAssignment& given = {},
                  bool continuity_correction = false);

// For a three-variable table (first, second, third):
//   P(first=1 | second=1, third=l) / P(first=1 | second=0, third=l), l = 0, 1.
// Throws Error{kEmptySlice} for an empty (second, third) slice.
std::pair<double, double> conditional_relative_risks(const CountTable& t);

struct InteractionTerm {
  std::vector<std::size_t> vars;  // positions within the triple
  double estimate = 0.0;
  double standard_error = 0.0;
  double studentized = 0.0;
};

struct LogLinearTerms {
  std::vector<InteractionTerm> terms;  // AB, AC, BC, ABC
};

// Saturated log-linear interactions in effect coding: for interaction h,
// u_h = (1/8) sum_cells sign_h(cell) ln n(cell), where sign_h is the product
// over variables in h of +1 at level 1 and -1 at level 0;
// SE = (1/8) sqrt(sum 1/n(cell)). Needs q == 3.
LogLinearTerms studentized_interactions(const CountTable& t,
                                        bool continuity_correction = false);

// Joint table over items and root, and the leaf table over items.
std::pair<ProbTable, ProbTable> star_marginal(const BinaryStarModel& model);

struct InequalitySlack {
  std::string description;
  double slack = 0.0;  // >= 0 when the inequality holds
};

struct StarConditionsVerdict {
  std::array<InequalitySlack, 9> slacks;
  bool pass = false;
};

// The nine inequality constraints a three-leaf star graph with a binary root
// places on the leaf distribution: for each leaf, the odds of level 1 to 0
// when the other two leaves match at level 1 are at least those when they
// match at level 0 (slack: ratio difference), and for each leaf pair and each
// level of the third leaf, a log odds-ratio >= 0.
// Throws Error{kZeroCell} if any cell is zero.
StarConditionsVerdict q3_star_conditions(const ProbTable& t);
StarConditionsVerdict q3_star_conditions(const CountTable& t);

struct ConditionalDependence {
  std::size_t i = 0;
  std::size_t j = 0;
  LevelAssignment given;
  double cross_difference = 0.0;  // n00 n11 - n10 n01 on the slice
  std::optional<double> odds_ratio;
  std::optional<double> log_odds_z;  // Wald z of log odds-ratio, all cells > 0
  bool pass = false;
  bool borderline = false;  // |z| below 1.96
};

struct Mtp2Verdict {
  bool pass = false;
  bool strict = false;
  std::vector<ConditionalDependence> checks;
};

// Every pair's odds-ratio given each full level assignment of the other q-2
// variables is >= 1 (strict: > 1). Throws Error{kEmptySlice}.
Mtp2Verdict mtp2_check(const CountTable& t, bool strict);
Mtp2Verdict mtp2_check(const ProbTable& t, bool strict);

// Three bivariate tables over (A,B), (A,C), (B,C), first variable fastest.
struct MarginSystem {
  ProbTable ab;
  ProbTable ac;
  ProbTable bc;

  static MarginSystem from_counts(const CountTable& ab, const CountTable& ac,
                                  const CountTable& bc);
  static MarginSystem from_joint(const ProbTable& joint);
};

struct InfeasibilityCertificate {
  std::array<double, 8> cells{};
  std::vector<std::size_t> negative_cells;
};

using Reconstruction = std::variant<ProbTable, InfeasibilityCertificate>;

// Cell probabilities implied by the pairwise margins with the third central
// moment set to zero:
//   mu_123 = mu_3 mu_12 + mu_2 mu_13 + mu_1 mu_23 - 2 mu_1 mu_2 mu_3,
// recovered by inclusion-exclusion. Unclamped cells, count-vector order.
// Throws Error{kInconsistentMargins} when univariate margins disagree by more
// than 1e-9.
std::array<double, 8> reconstruct_cells(const MarginSystem& ms);

// The reconstructed table when every cell is >= -1e-12 (small negatives
// clamped to 0), otherwise a certificate listing the negative cells.
Reconstruction reconstruct_from_pairwise(const MarginSystem& ms);

}  // namespace startetrad
