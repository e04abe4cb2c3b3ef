#include "startetrad/tables.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <type_traits>
#include <numeric>
#include <string>

#include "startetrad/error.hpp"
#include "startetrad/simulator.hpp"

namespace startetrad {
namespace {

constexpr double kSumTolerance = 1e-12;
constexpr double kMarginTolerance = 1e-9;
constexpr double kNegativeCellTolerance = 1e-12;
constexpr double kWaldCritical = 1.96;

std::size_t cell_count(std::size_t q) {
  if (q == 0 || q > 30) {
    throw Error(ErrorCode::kInvalidArgument,
                "number of binary variables must be in 1..30, got " + std::to_string(q));
  }
  return std::size_t{1} << q;
}

std::size_t index_of_levels(const std::vector<int>& levels) {
  std::size_t cell = 0;
  for (std::size_t v = 0; v < levels.size(); ++v) {
    if (levels[v] != 0 && levels[v] != 1) {
      throw Error(ErrorCode::kInvalidArgument, "levels must be 0 or 1");
    }
    cell |= static_cast<std::size_t>(levels[v]) << v;
  }
  return cell;
}

void check_vars(std::size_t q, const std::vector<std::size_t>& vars) {
  for (std::size_t k = 0; k < vars.size(); ++k) {
    if (vars[k] >= q) {
      throw Error(ErrorCode::kInvalidArgument,
                  "variable index " + std::to_string(vars[k]) + " out of range");
    }
    for (std::size_t m = 0; m < k; ++m) {
      if (vars[m] == vars[k]) {
        throw Error(ErrorCode::kLabelClash, "variable listed twice");
      }
    }
  }
}

template <typename T>
std::vector<T> collapse(const std::vector<T>& cells, std::size_t q,
                        const std::vector<std::size_t>& vars) {
  check_vars(q, vars);
  std::vector<T> out(std::size_t{1} << vars.size(), T{0});
  for (std::size_t cell = 0; cell < cells.size(); ++cell) {
    std::size_t target = 0;
    for (std::size_t k = 0; k < vars.size(); ++k) {
      target |= static_cast<std::size_t>(level_of(cell, vars[k])) << k;
    }
    out[target] += cells[cell];
  }
  return out;
}

std::vector<std::string> pick_names(const std::vector<std::string>& names,
                                    const std::vector<std::size_t>& vars) {
  std::vector<std::string> out;
  out.reserve(vars.size());
  for (auto v : vars) out.push_back(names[v]);
  return out;
}

void check_pair(std::size_t q, std::size_t i, std::size_t j, const LevelAssignment& given) {
  if (i >= q || j >= q) throw Error(ErrorCode::kInvalidArgument, "variable out of range");
  if (i == j) throw Error(ErrorCode::kLabelClash, "pair needs two distinct variables");
  for (const auto& [v, level] : given) {
    if (v >= q) throw Error(ErrorCode::kInvalidArgument, "variable out of range");
    if (v == i || v == j) {
      throw Error(ErrorCode::kLabelClash, "conditioning variable is part of the pair");
    }
    if (level != 0 && level != 1) {
      throw Error(ErrorCode::kInvalidArgument, "levels must be 0 or 1");
    }
  }
}

// Slice of the (i, j) table at fixed levels of `given`, other variables summed.
template <typename T>
std::array<T, 4> pair_slice(const std::vector<T>& cells, std::size_t q, std::size_t i,
                            std::size_t j, const LevelAssignment& given) {
  check_pair(q, i, j, given);
  std::array<T, 4> out{};
  for (std::size_t cell = 0; cell < cells.size(); ++cell) {
    bool match = true;
    for (const auto& [v, level] : given) {
      if (level_of(cell, v) != level) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    out[static_cast<std::size_t>(level_of(cell, i) + 2 * level_of(cell, j))] += cells[cell];
  }
  return out;
}

template <typename T>
SquareMatrix pairwise_phi(const std::vector<T>& cells, std::size_t q,
                          const std::vector<std::string>& names) {
  if (q < 2) throw Error(ErrorCode::kDimensionTooSmall, "need at least two variables");
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(q),
                                                static_cast<Eigen::Index>(q));
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = i + 1; j < q; ++j) {
      const auto slice = pair_slice(cells, q, i, j, {});
      Table2x2 t;
      for (std::size_t k = 0; k < 4; ++k) t.cells[k] = static_cast<double>(slice[k]);
      double value = 0.0;
      try {
        value = phi_correlation(t).value();
      } catch (const Error& e) {
        throw Error(ErrorCode::kDegenerateMargin,
                    "pair (" + names[i] + ", " + names[j] + ") has an empty margin");
      }
      r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
      r(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = value;
    }
  }
  return SquareMatrix(std::move(r), names);
}

// All assignments of levels to `vars`.
std::vector<LevelAssignment> assignments(const std::vector<std::size_t>& vars) {
  std::vector<LevelAssignment> out;
  const std::size_t n = std::size_t{1} << vars.size();
  for (std::size_t code = 0; code < n; ++code) {
    LevelAssignment a;
    for (std::size_t k = 0; k < vars.size(); ++k) a.emplace_back(vars[k], level_of(code, k));
    out.push_back(std::move(a));
  }
  return out;
}

template <typename T>
Mtp2Verdict mtp2_impl(const std::vector<T>& cells, std::size_t q, bool strict) {
  if (q < 2) throw Error(ErrorCode::kDimensionTooSmall, "need at least two variables");
  Mtp2Verdict verdict;
  verdict.strict = strict;
  verdict.pass = true;
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = i + 1; j < q; ++j) {
      std::vector<std::size_t> rest;
      for (std::size_t v = 0; v < q; ++v) {
        if (v != i && v != j) rest.push_back(v);
      }
      for (auto& given : assignments(rest)) {
        const auto s = pair_slice(cells, q, i, j, given);
        if (s[0] + s[1] + s[2] + s[3] == T{0}) {
          throw Error(ErrorCode::kEmptySlice, "empty conditioning slice");
        }
        ConditionalDependence d;
        d.i = i;
        d.j = j;
        d.given = std::move(given);
        const T concordant = s[0] * s[3];
        const T discordant = s[1] * s[2];
        d.cross_difference = static_cast<double>(concordant - discordant);
        if constexpr (std::is_integral_v<T>) {
          d.pass = strict ? concordant > discordant : concordant >= discordant;
        } else {
          const double slack = kSumTolerance * (concordant + discordant);
          d.pass = strict ? d.cross_difference > slack : d.cross_difference >= -slack;
        }
        if (discordant > T{0}) {
          d.odds_ratio = static_cast<double>(concordant) / static_cast<double>(discordant);
        }
        if (concordant > T{0} && discordant > T{0}) {
          if constexpr (std::is_integral_v<T>) {
            double inv = 0.0;
            for (auto c : s) inv += 1.0 / static_cast<double>(c);
            d.log_odds_z = std::log(*d.odds_ratio) / std::sqrt(inv);
            d.borderline = std::abs(*d.log_odds_z) < kWaldCritical;
          }
        }
        verdict.pass = verdict.pass && d.pass;
        verdict.checks.push_back(std::move(d));
      }
    }
  }
  return verdict;
}

}  // namespace

std::vector<std::string> default_variable_names(std::size_t q) {
  std::vector<std::string> names;
  names.reserve(q);
  for (std::size_t i = 1; i <= q; ++i) names.push_back("V" + std::to_string(i));
  return names;
}

CountTable::CountTable(std::size_t q, std::vector<std::int64_t> counts,
                       std::vector<std::string> names)
    : q_(q), counts_(std::move(counts)), names_(std::move(names)) {
  if (counts_.size() != cell_count(q_)) {
    throw Error(ErrorCode::kBadLength,
                "expected " + std::to_string(cell_count(q_)) + " cells, got " +
                    std::to_string(counts_.size()));
  }
  for (std::size_t c = 0; c < counts_.size(); ++c) {
    if (counts_[c] < 0) {
      throw Error(ErrorCode::kNegativeCount, "cell " + std::to_string(c) + " is negative", c);
    }
  }
  total_ = std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
  if (total_ < 1) throw Error(ErrorCode::kInvalidArgument, "table total must be >= 1");
  if (names_.empty()) names_ = default_variable_names(q_);
  if (names_.size() != q_) {
    throw Error(ErrorCode::kInvalidArgument, "expected " + std::to_string(q_) + " names");
  }
}

std::int64_t CountTable::at(const std::vector<int>& levels) const {
  if (levels.size() != q_) throw Error(ErrorCode::kInvalidArgument, "wrong number of levels");
  return counts_[index_of_levels(levels)];
}

CountTable CountTable::margin(const std::vector<std::size_t>& vars) const {
  return CountTable(vars.size(), collapse(counts_, q_, vars), pick_names(names_, vars));
}

ProbTable::ProbTable(std::size_t q, std::vector<double> probs, std::vector<std::string> names)
    : q_(q), probs_(std::move(probs)), names_(std::move(names)) {
  if (probs_.size() != cell_count(q_)) {
    throw Error(ErrorCode::kBadLength,
                "expected " + std::to_string(cell_count(q_)) + " cells, got " +
                    std::to_string(probs_.size()));
  }
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw Error(ErrorCode::kInvalidArgument,
                "probabilities sum to " + std::to_string(sum) + ", not 1");
  }
  if (names_.empty()) names_ = default_variable_names(q_);
  if (names_.size() != q_) {
    throw Error(ErrorCode::kInvalidArgument, "expected " + std::to_string(q_) + " names");
  }
}

ProbTable ProbTable::from_counts(const CountTable& counts) {
  std::vector<double> p(counts.counts().size());
  const auto n = static_cast<double>(counts.total());
  for (std::size_t c = 0; c < p.size(); ++c) p[c] = static_cast<double>(counts.counts()[c]) / n;
  return ProbTable(counts.q(), std::move(p), counts.names());
}

double ProbTable::at(const std::vector<int>& levels) const {
  if (levels.size() != q_) throw Error(ErrorCode::kInvalidArgument, "wrong number of levels");
  return probs_[index_of_levels(levels)];
}

ProbTable ProbTable::margin(const std::vector<std::size_t>& vars) const {
  return ProbTable(vars.size(), collapse(probs_, q_, vars), pick_names(names_, vars));
}

Table2x2 to_2x2(const CountTable& t) {
  if (t.q() != 2) throw Error(ErrorCode::kInvalidArgument, "expected a 2x2 table");
  Table2x2 out;
  for (std::size_t k = 0; k < 4; ++k) out.cells[k] = static_cast<double>(t.counts()[k]);
  return out;
}

Table2x2 to_2x2(const ProbTable& t) {
  if (t.q() != 2) throw Error(ErrorCode::kInvalidArgument, "expected a 2x2 table");
  Table2x2 out;
  for (std::size_t k = 0; k < 4; ++k) out.cells[k] = t.probs()[k];
  return out;
}

PhiCorrelation phi_correlation(const Table2x2& t) {
  const double n = t.cells[0] + t.cells[1] + t.cells[2] + t.cells[3];
  if (!(n > 0.0)) throw Error(ErrorCode::kDegenerateMargin, "empty table");
  const double p00 = t.at(0, 0) / n, p10 = t.at(1, 0) / n;
  const double p01 = t.at(0, 1) / n, p11 = t.at(1, 1) / n;
  const double row0 = p00 + p01, row1 = p10 + p11;
  const double col0 = p00 + p10, col1 = p01 + p11;
  if (!(row0 > 0.0 && row1 > 0.0 && col0 > 0.0 && col1 > 0.0)) {
    throw Error(ErrorCode::kDegenerateMargin, "a row or column sum is zero");
  }
  const double kappa = std::sqrt(row0 * row1 * col0 * col1);

  PhiCorrelation out;
  out.cross_product = (p00 * p11 - p10 * p01) / kappa;
  out.covariance = (p11 - row1 * col1) / kappa;

  Eigen::Matrix2d joint;
  joint << p00, p01, p10, p11;
  const Eigen::Vector2d row_scale(1.0 / std::sqrt(row0), 1.0 / std::sqrt(row1));
  const Eigen::Vector2d col_scale(1.0 / std::sqrt(col0), 1.0 / std::sqrt(col1));
  out.determinant = (row_scale.asDiagonal() * joint * col_scale.asDiagonal()).determinant();
  return out;
}

SquareMatrix correlation_matrix(const CountTable& t) {
  return pairwise_phi(t.counts(), t.q(), t.names());
}

SquareMatrix correlation_matrix(const ProbTable& t) {
  return pairwise_phi(t.probs(), t.q(), t.names());
}

double odds_ratio(const CountTable& t, std::size_t i, std::size_t j,
                  const LevelAssignment& given, bool continuity_correction) {
  const auto s = pair_slice(t.counts(), t.q(), i, j, given);
  std::array<double, 4> c{};
  for (std::size_t k = 0; k < 4; ++k) {
    c[k] = static_cast<double>(s[k]) + (continuity_correction ? 0.5 : 0.0);
    if (!(c[k] > 0.0)) {
      throw Error(ErrorCode::kZeroCell,
                  "zero cell in the (" + t.names()[i] + ", " + t.names()[j] + ") table");
    }
  }
  return (c[0] * c[3]) / (c[1] * c[2]);
}

std::pair<double, double> conditional_relative_risks(const CountTable& t) {
  if (t.q() != 3) throw Error(ErrorCode::kInvalidArgument, "expected a three-variable table");
  auto risk_ratio = [&](int third) {
    double risk[2] = {0.0, 0.0};
    for (int second = 0; second <= 1; ++second) {
      const auto n0 = static_cast<double>(t.at({0, second, third}));
      const auto n1 = static_cast<double>(t.at({1, second, third}));
      if (n0 + n1 <= 0.0) {
        throw Error(ErrorCode::kEmptySlice,
                    "no observations with " + t.names()[1] + "=" + std::to_string(second) +
                        ", " + t.names()[2] + "=" + std::to_string(third));
      }
      risk[second] = n1 / (n0 + n1);
    }
    if (!(risk[0] > 0.0)) {
      throw Error(ErrorCode::kZeroCell, "reference risk is zero");
    }
    return risk[1] / risk[0];
  };
  return {risk_ratio(0), risk_ratio(1)};
}

LogLinearTerms studentized_interactions(const CountTable& t, bool continuity_correction) {
  if (t.q() != 3) throw Error(ErrorCode::kInvalidArgument, "expected a three-variable table");
  std::array<double, 8> logs{};
  double inverse_sum = 0.0;
  for (std::size_t cell = 0; cell < 8; ++cell) {
    const double n = static_cast<double>(t.counts()[cell]) + (continuity_correction ? 0.5 : 0.0);
    if (!(n > 0.0)) throw Error(ErrorCode::kZeroCell, "zero cell in three-way table", cell);
    logs[cell] = std::log(n);
    inverse_sum += 1.0 / n;
  }
  const double se = std::sqrt(inverse_sum) / 8.0;

  LogLinearTerms out;
  for (const auto& vars : {std::vector<std::size_t>{0, 1}, std::vector<std::size_t>{0, 2},
                           std::vector<std::size_t>{1, 2}, std::vector<std::size_t>{0, 1, 2}}) {
    double u = 0.0;
    for (std::size_t cell = 0; cell < 8; ++cell) {
      int sign = 1;
      for (auto v : vars) sign *= level_of(cell, v) == 1 ? 1 : -1;
      u += sign * logs[cell];
    }
    u /= 8.0;
    out.terms.push_back({vars, u, se, u / se});
  }
  return out;
}

std::pair<ProbTable, ProbTable> star_marginal(const BinaryStarModel& model) {
  auto tables = exact_tables(model);
  return {std::move(tables.joint), std::move(tables.leaves)};
}

StarConditionsVerdict q3_star_conditions(const ProbTable& t) {
  if (t.q() != 3) throw Error(ErrorCode::kInvalidArgument, "expected a three-variable table");
  for (std::size_t cell = 0; cell < 8; ++cell) {
    if (!(t.probs()[cell] > 0.0)) {
      throw Error(ErrorCode::kZeroCell, "star conditions need positive cells", cell);
    }
  }
  auto p = [&](int a, int b, int c) { return t.at({a, b, c}); };
  const auto& nm = t.names();

  StarConditionsVerdict v;
  v.slacks[0] = {"odds of " + nm[0] + " when the others match at 1 vs at 0",
                 p(1, 1, 1) / p(0, 1, 1) - p(1, 0, 0) / p(0, 0, 0)};
  v.slacks[1] = {"odds of " + nm[1] + " when the others match at 1 vs at 0",
                 p(1, 1, 1) / p(1, 0, 1) - p(0, 1, 0) / p(0, 0, 0)};
  v.slacks[2] = {"odds of " + nm[2] + " when the others match at 1 vs at 0",
                 p(1, 1, 1) / p(1, 1, 0) - p(0, 0, 1) / p(0, 0, 0)};

  std::size_t slot = 3;
  const std::array<std::array<std::size_t, 3>, 3> pairs{{{0, 1, 2}, {0, 2, 1}, {1, 2, 0}}};
  for (const auto& [i, j, k] : pairs) {
    for (int level = 0; level <= 1; ++level) {
      const auto s = pair_slice(t.probs(), 3, i, j, {{k, level}});
      v.slacks[slot++] = {"log odds-ratio of (" + nm[i] + ", " + nm[j] + ") given " + nm[k] +
                              "=" + std::to_string(level),
                          std::log((s[0] * s[3]) / (s[1] * s[2]))};
    }
  }
  v.pass = std::all_of(v.slacks.begin(), v.slacks.end(),
                       [](const InequalitySlack& s) { return s.slack >= 0.0; });
  return v;
}

StarConditionsVerdict q3_star_conditions(const CountTable& t) {
  if (t.q() != 3) throw Error(ErrorCode::kInvalidArgument, "expected a three-variable table");
  for (std::size_t cell = 0; cell < 8; ++cell) {
    if (t.counts()[cell] == 0) {
      throw Error(ErrorCode::kZeroCell, "star conditions need positive cells", cell);
    }
  }
  return q3_star_conditions(ProbTable::from_counts(t));
}

Mtp2Verdict mtp2_check(const CountTable& t, bool strict) {
  return mtp2_impl(t.counts(), t.q(), strict);
}

Mtp2Verdict mtp2_check(const ProbTable& t, bool strict) {
  return mtp2_impl(t.probs(), t.q(), strict);
}

MarginSystem MarginSystem::from_counts(const CountTable& ab, const CountTable& ac,
                                       const CountTable& bc) {
  for (const auto* t : {&ab, &ac, &bc}) {
    if (t->q() != 2) throw Error(ErrorCode::kInvalidArgument, "margins must be 2x2 tables");
  }
  return {ProbTable::from_counts(ab), ProbTable::from_counts(ac), ProbTable::from_counts(bc)};
}

MarginSystem MarginSystem::from_joint(const ProbTable& joint) {
  if (joint.q() != 3) throw Error(ErrorCode::kInvalidArgument, "expected a three-variable table");
  return {joint.margin({0, 1}), joint.margin({0, 2}), joint.margin({1, 2})};
}

std::array<double, 8> reconstruct_cells(const MarginSystem& ms) {
  auto first = [](const ProbTable& t) { return t.at({1, 0}) + t.at({1, 1}); };
  auto second = [](const ProbTable& t) { return t.at({0, 1}) + t.at({1, 1}); };

  const double mu1 = first(ms.ab), mu2 = second(ms.ab), mu3 = second(ms.ac);
  const struct {
    double a, b;
    const char* what;
  } checks[] = {{mu1, first(ms.ac), "first variable in (A,B) and (A,C)"},
                {mu2, first(ms.bc), "B in (A,B) and (B,C)"},
                {mu3, second(ms.bc), "C in (A,C) and (B,C)"}};
  for (const auto& c : checks) {
    if (std::abs(c.a - c.b) > kMarginTolerance) {
      throw Error(ErrorCode::kInconsistentMargins,
                  std::string("univariate margin of ") + c.what + " differs: " +
                      std::to_string(c.a) + " vs " + std::to_string(c.b));
    }
  }
  const double mu12 = ms.ab.at({1, 1}), mu13 = ms.ac.at({1, 1}), mu23 = ms.bc.at({1, 1});
  const double mu123 = mu3 * mu12 + mu2 * mu13 + mu1 * mu23 - 2.0 * mu1 * mu2 * mu3;

  // Raw moment E[prod_{v in S} X_v] indexed by the bit mask of S.
  const std::array<double, 8> moment{1.0, mu1, mu2, mu12, mu3, mu13, mu23, mu123};
  std::array<double, 8> cells{};
  for (std::size_t cell = 0; cell < 8; ++cell) {
    const std::size_t zeros = ~cell & 7U;
    double p = 0.0;
    // Sum over subsets T of the zero positions of (-1)^|T| mu_{ones + T}.
    for (std::size_t t = zeros;; t = (t - 1) & zeros) {
      p += (std::popcount(t) % 2 == 0 ? 1.0 : -1.0) * moment[cell | t];
      if (t == 0) break;
    }
    cells[cell] = p;
  }
  return cells;
}

Reconstruction reconstruct_from_pairwise(const MarginSystem& ms) {
  const auto cells = reconstruct_cells(ms);
  InfeasibilityCertificate certificate{cells, {}};
  for (std::size_t c = 0; c < 8; ++c) {
    if (cells[c] < -kNegativeCellTolerance) certificate.negative_cells.push_back(c);
  }
  if (!certificate.negative_cells.empty()) return certificate;

  std::vector<double> probs(cells.begin(), cells.end());
  double sum = 0.0;
  for (auto& p : probs) {
    p = std::max(p, 0.0);
    sum += p;
  }
  for (auto& p : probs) p /= sum;
  return ProbTable(3, std::move(probs), {ms.ab.names()[0], ms.ab.names()[1], ms.ac.names()[1]});
}

}  // namespace startetrad
