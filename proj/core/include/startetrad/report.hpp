#pragma once

// Diagnostic reports assembled from the condition battery and the table
// summaries, rendered as 4-decimal text or as versioned JSON.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "startetrad/gaussian_star.hpp"
#include "startetrad/io.hpp"
#include "startetrad/matrix.hpp"
#include "startetrad/simulator.hpp"
#include "startetrad/tables.hpp"
#include "startetrad/tetrad.hpp"

namespace startetrad {

inline constexpr int kReportSchemaVersion = 1;

struct AnalyzeOptions {
  double tol_exact = kExactTolerance;
  double tol_stat = kStatisticalTolerance;
  bool continuity_correction = false;
  bool strict_mtp2 = false;
  // Judge residual conditions at tol_stat. Unset: on for count data, off for
  // correlation matrices.
  std::optional<bool> statistical;
};

// Summaries of one item triple of a count table; positions refer to the
// triple (first, second, third). Entries that could not be computed (zero
// cells, empty slices) are unset and explained in `errors`.
struct TripleSummary {
  std::array<std::size_t, 3> items{};
  std::array<std::string, 3> names;
  // Pairs (first,second), (first,third), (second,third).
  std::array<std::optional<double>, 3> marginal_odds_ratios;
  // Same pairs, at level 0 and 1 of the remaining item of the triple.
  std::array<std::array<std::optional<double>, 2>, 3> conditional_odds_ratios;
  std::optional<std::pair<double, double>> relative_risks;
  std::optional<LogLinearTerms> interactions;
  std::optional<StarConditionsVerdict> star_conditions;
  std::vector<std::string> errors;
};

struct DiagnosticReport {
  std::string source;
  std::string format;  // "counts" or "corr"
  std::size_t q = 0;
  std::optional<std::int64_t> n;
  std::vector<std::string> names;
  AnalyzeOptions options;
  bool statistical = false;
  std::vector<std::string> warnings;

  SquareMatrix correlations = SquareMatrix::identity(1);
  std::optional<SquareMatrix> partials;
  std::optional<Loadings> loadings;
  // Partial correlations given all other variables in the joint item/root
  // matrix built from the loadings; the root is labelled "L".
  std::optional<SquareMatrix> joint_partials;
  ConditionBattery battery;

  std::vector<TripleSummary> triples;
  std::optional<Mtp2Verdict> mtp2;
  // Conditions on the table itself (binary-root inequalities, MTP2).
  std::vector<ConditionVerdict> table_conditions;

  Conclusion overall = Conclusion::kInconsistent;
  std::vector<std::string> cited;  // failing conditions behind `overall`
};

DiagnosticReport analyze(const CountTable& t, const AnalyzeOptions& options = {},
                         std::string source = {});
DiagnosticReport analyze(const CorrelationInput& input, const AnalyzeOptions& options = {},
                         std::string source = {});

// 0 consistent, 1 inconsistent or heywood.
int exit_code(const DiagnosticReport& r);

std::string render_text(const DiagnosticReport& r);
// Battery section only.
std::string render_battery_text(const DiagnosticReport& r);
std::string render_structured(const DiagnosticReport& r);

struct FitReport {
  std::string source;
  std::string method;  // "closed_form" or "least_squares"
  SquareMatrix correlations = SquareMatrix::identity(1);
  Loadings loadings;
  std::optional<double> max_offdiag_residual;
  int iterations = 0;
  bool converged = true;
};

// Closed form for three items, least squares otherwise.
FitReport fit_report(const SquareMatrix& p, std::string source = {});
// 0 when every loading is proper, else 1.
int exit_code(const FitReport& r);
std::string render_text(const FitReport& r);
std::string render_structured(const FitReport& r);

struct ReconstructReport {
  MarginSystem margins;
  std::optional<std::int64_t> total;  // common total when margins were counts
  std::array<double, 8> cells{};
  Reconstruction result;
  bool feasible() const { return std::holds_alternative<ProbTable>(result); }
};

ReconstructReport reconstruct_report(const MarginSystem& ms,
                                     std::optional<std::int64_t> total = std::nullopt);
std::string render_text(const ReconstructReport& r);
std::string render_structured(const ReconstructReport& r);

struct SimulationReport {
  std::string model;  // "binary" or "gaussian"
  std::uint64_t seed = 0;
  std::int64_t n = 0;
  std::variant<CountTable, SquareMatrix> result;
};

// Text output is the file format of the result (counts or corr).
std::string render_text(const SimulationReport& r);
std::string render_structured(const SimulationReport& r);

}  // namespace startetrad
