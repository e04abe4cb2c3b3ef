#include "startetrad/tetrad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "startetrad/error.hpp"

namespace startetrad {
namespace {

constexpr double kSymmetryTolerance = 1e-9;

double tetrad_value(const Eigen::MatrixXd& s, std::size_t i, std::size_t j,
                    std::size_t h, std::size_t k) {
  auto at = [&](std::size_t r, std::size_t c) {
    return s(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  };
  return at(i, h) * at(j, k) - at(j, h) * at(i, k);
}

std::vector<TetradResidual> enumerate_tetrads(const Eigen::MatrixXd& s) {
  const auto q = static_cast<std::size_t>(s.rows());
  std::vector<TetradResidual> out;
  for (std::size_t a = 0; a < q; ++a) {
    for (std::size_t b = a + 1; b < q; ++b) {
      for (std::size_t c = b + 1; c < q; ++c) {
        for (std::size_t d = c + 1; d < q; ++d) {
          for (const auto& idx : {std::array<std::size_t, 4>{a, b, c, d},
                                  std::array<std::size_t, 4>{a, c, b, d},
                                  std::array<std::size_t, 4>{a, d, b, c}}) {
            out.push_back({idx, tetrad_value(s, idx[0], idx[1], idx[2], idx[3])});
          }
        }
      }
    }
  }
  return out;
}

// Partial correlations from a concentration matrix, or the concentration
// matrix scaled to unit diagonal when `negate` is false.
Eigen::MatrixXd scale_concentration(const Eigen::MatrixXd& k, bool negate) {
  const Eigen::VectorXd inv_sd = k.diagonal().array().sqrt().inverse().matrix();
  Eigen::MatrixXd out = inv_sd.asDiagonal() * k * inv_sd.asDiagonal();
  if (negate) out = -out;
  out.diagonal().setOnes();
  return out;
}

Witness pair_witness(const SquareMatrix& m, std::size_t i, std::size_t j,
                     std::string note) {
  return {{m.labels()[i], m.labels()[j]}, m(i, j), std::move(note)};
}

std::vector<Witness> nonpositive_entries(const SquareMatrix& m, std::string_view what) {
  std::vector<Witness> out;
  for (std::size_t i = 0; i < m.dim(); ++i) {
    for (std::size_t j = i + 1; j < m.dim(); ++j) {
      if (!(m(i, j) > 0.0)) {
        out.push_back(pair_witness(m, i, j, std::string(what) + " is not positive"));
      } else if (!(m(i, j) < 1.0)) {
        out.push_back(pair_witness(m, i, j, std::string(what) + " is not below one"));
      }
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Witness& a, const Witness& b) { return a.value < b.value; });
  return out;
}

Witness worst_tetrad(const SquareMatrix& m, const TetradReport& t) {
  const auto it = std::max_element(
      t.residuals.begin(), t.residuals.end(),
      [](const TetradResidual& a, const TetradResidual& b) {
        return std::abs(a.value) < std::abs(b.value);
      });
  Witness w;
  for (auto idx : it->indices) w.items.push_back(m.labels()[idx]);
  w.value = it->value;
  w.note = "largest tetrad difference s_ih*s_jk - s_jh*s_ik";
  return w;
}

struct Judge {
  const BatteryOptions& options;

  void residual(ConditionVerdict& v, bool precondition, double statistic) const {
    v.statistic = statistic;
    v.pass_exact = precondition && statistic <= options.tol_exact;
    v.pass_statistical = precondition && statistic <= options.tol_stat;
    v.pass = options.statistical ? v.pass_statistical : v.pass_exact;
    v.tolerance = options.statistical ? options.tol_stat : options.tol_exact;
  }

  void sign(ConditionVerdict& v, bool pass, double statistic) const {
    v.statistic = statistic;
    v.pass = v.pass_exact = v.pass_statistical = pass;
    v.tolerance = options.tol_exact;
  }
};

bool all_offdiagonal_positive(const SquareMatrix& p) {
  for (std::size_t i = 0; i < p.dim(); ++i) {
    for (std::size_t j = i + 1; j < p.dim(); ++j) {
      if (!(p(i, j) > 0.0 && p(i, j) < 1.0)) return false;
    }
  }
  return true;
}

void add_loadings_verdict(ConditionBattery& b, const Judge& judge,
                          const SquareMatrix& p, bool positive) {
  ConditionVerdict v;
  v.id = "proper_loadings";
  v.description = "single-factor loadings are proper, 0 < rho_iL < 1";
  if (!positive) {
    judge.sign(v, false, 0.0);
    v.witnesses.push_back({{}, 0.0, "fit not attempted: a correlation is not positive"});
    b.conditions.push_back(std::move(v));
    return;
  }
  Loadings loadings = p.dim() == 3 ? fit_loadings_triple(p(0, 1), p(0, 2), p(1, 2))
                                   : fit_loadings(p).loadings;
  double largest = 0.0;
  for (std::size_t i = 0; i < loadings.size(); ++i) {
    const double value = loadings[i];
    largest = std::isnan(value) ? value : std::max(largest, value);
    if (loadings.status()[i] != LoadingStatus::kProper) {
      v.witnesses.push_back({{p.labels()[i]}, value,
                             "loading is " + std::string(to_string(loadings.status()[i]))});
    }
  }
  judge.sign(v, loadings.all_proper(), largest);
  b.loadings = std::move(loadings);
  b.conditions.push_back(std::move(v));
}

void battery_three_items(ConditionBattery& b, const SquareMatrix& p,
                         const Judge& judge) {
  b.notes.emplace_back(
      "tetrad conditions need at least four items; checked closed-form loadings "
      "and positivity of all subset partial correlations instead");

  const bool positive = all_offdiagonal_positive(p);
  {
    ConditionVerdict v;
    v.id = "positive_correlations";
    v.description = "all item correlations strictly between 0 and 1";
    v.witnesses = nonpositive_entries(p, "correlation");
    double smallest = 1.0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i + 1; j < 3; ++j) smallest = std::min(smallest, p(i, j));
    judge.sign(v, positive, smallest);
    b.conditions.push_back(std::move(v));
  }

  try {
    add_loadings_verdict(b, judge, p, positive);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kZeroDenominator) throw;
    ConditionVerdict v;
    v.id = "proper_loadings";
    v.description = "single-factor loadings are proper, 0 < rho_iL < 1";
    judge.sign(v, false, 0.0);
    v.witnesses.push_back({{}, 0.0, e.what()});
    b.conditions.push_back(std::move(v));
  }

  ConditionVerdict v;
  v.id = "subset_partials_positive";
  v.description = "partial correlations positive for every conditioning subset";
  double smallest = 1.0;
  bool ok = true;
  const auto& labels = p.labels();
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      const std::size_t k = 3 - i - j;
      for (const auto& given : {std::vector<Label>{}, std::vector<Label>{labels[k]}}) {
        const double r = partial_correlation_subset(p, labels[i], labels[j], given);
        smallest = std::min(smallest, r);
        if (!(r > judge.options.tol_exact)) {
          ok = false;
          std::vector<Label> items{labels[i], labels[j]};
          items.insert(items.end(), given.begin(), given.end());
          v.witnesses.push_back({std::move(items), r,
                                 given.empty() ? "marginal correlation not positive"
                                               : "partial correlation not positive"});
        }
      }
    }
  }
  judge.sign(v, ok, smallest);
  b.conditions.push_back(std::move(v));

  try {
    b.partials = partial_correlations_given_rest(p);
  } catch (const Error&) {
  }
  b.rank_one = rank_one_residual(p);
}

void battery_four_or_more(ConditionBattery& b, const SquareMatrix& p,
                          const Judge& judge) {
  const bool gaussian = b.mode == BatteryMode::kGaussian;

  TetradReport corr = tetrad_check(p, b.tolerance);
  {
    ConditionVerdict v;
    v.id = "positive_tetrad_correlations";
    v.description = "item correlations positive, below one, with vanishing tetrads";
    judge.residual(v, corr.all_positive, corr.max_abs_residual);
    v.witnesses = nonpositive_entries(p, "correlation");
    if (!corr.residuals.empty()) v.witnesses.push_back(worst_tetrad(p, corr));
    b.conditions.push_back(std::move(v));
  }

  add_loadings_verdict(b, judge, p, corr.all_positive);

  b.rank_one = rank_one_residual(p);
  if (gaussian) {
    ConditionVerdict v;
    v.id = "rank_one";
    v.description = "P minus a diagonal with entries in (0,1) has rank one";
    judge.residual(v, corr.all_positive && b.rank_one->delta_in_unit_interval,
                   b.rank_one->residual);
    for (Eigen::Index i = 0; i < b.rank_one->delta.size(); ++i) {
      const double d = b.rank_one->delta(i);
      if (!(d > 0.0 && d < 1.0)) {
        v.witnesses.push_back({{p.labels()[static_cast<std::size_t>(i)]}, d,
                               "deflation outside (0, 1)"});
      }
    }
    b.conditions.push_back(std::move(v));
  }

  std::optional<SquareMatrix> concentration;
  try {
    concentration = invert(p);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingularMatrix) throw;
    b.notes.emplace_back(std::string("correlation matrix is singular: ") + e.what());
  }

  if (concentration) {
    b.concentration_sign = m_matrix_check(*concentration, /*strict=*/true);
    b.partials = SquareMatrix(scale_concentration(concentration->values(), true),
                              p.labels());
  }

  if (gaussian) {
    ConditionVerdict v;
    v.id = "concentration_m_matrix";
    v.description = "concentration matrix is a complete M-matrix with vanishing tetrads";
    if (concentration) {
      const SquareMatrix scaled(scale_concentration(concentration->values(), false),
                                p.labels());
      const TetradReport ct = tetrad_check(scaled, b.tolerance);
      judge.residual(v, b.concentration_sign->pass, ct.max_abs_residual);
      for (const auto& pos : b.concentration_sign->violations) {
        v.witnesses.push_back(pair_witness(*concentration, pos[0], pos[1],
                                           "concentration is not negative"));
      }
      if (!ct.residuals.empty()) {
        Witness w = worst_tetrad(scaled, ct);
        w.note = "largest tetrad difference of unit-scaled concentrations";
        v.witnesses.push_back(std::move(w));
      }
    } else {
      judge.sign(v, false, 0.0);
    }
    b.conditions.push_back(std::move(v));
  }

  {
    ConditionVerdict v;
    v.id = "partial_tetrads";
    v.description =
        "partial correlations given the remaining items form a positive tetrad matrix";
    if (b.partials) {
      b.partial_tetrads = tetrad_check(*b.partials, b.tolerance);
      judge.residual(v, b.partial_tetrads->all_positive,
                     b.partial_tetrads->max_abs_residual);
      v.witnesses = nonpositive_entries(*b.partials, "partial correlation");
      v.witnesses.push_back(worst_tetrad(*b.partials, *b.partial_tetrads));
    } else {
      judge.sign(v, false, 0.0);
    }
    b.conditions.push_back(std::move(v));
  }

  b.correlation_tetrads = std::move(corr);
}

}  // namespace

std::string_view to_string(BatteryMode mode) {
  return mode == BatteryMode::kGaussian ? "gaussian" : "binary";
}

std::string_view to_string(Conclusion conclusion) {
  switch (conclusion) {
    case Conclusion::kConsistent: return "consistent";
    case Conclusion::kInconsistent: return "inconsistent";
    case Conclusion::kHeywood: return "heywood";
  }
  return "unknown";
}

TetradReport tetrad_check(const SquareMatrix& s, double tolerance) {
  if (s.dim() < 4) {
    throw Error(ErrorCode::kDimensionTooSmall,
                "tetrads need at least four items, got " + std::to_string(s.dim()));
  }
  if (!s.is_symmetric(kSymmetryTolerance)) {
    throw Error(ErrorCode::kAsymmetry, "tetrad check needs a symmetric matrix");
  }
  TetradReport report;
  report.tolerance = tolerance;
  report.residuals = enumerate_tetrads(s.values());
  for (const auto& r : report.residuals) {
    report.max_abs_residual = std::max(report.max_abs_residual, std::abs(r.value));
  }
  report.is_tetrad = report.max_abs_residual <= tolerance;
  report.all_positive = all_offdiagonal_positive(s);
  return report;
}

MMatrixVerdict m_matrix_check(const SquareMatrix& k, bool strict, double tolerance) {
  MMatrixVerdict v;
  v.strict = strict;
  v.tolerance = tolerance;
  v.diagonal_positive = (k.values().diagonal().array() > 0.0).all();
  v.max_offdiagonal = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k.dim(); ++i) {
    for (std::size_t j = i + 1; j < k.dim(); ++j) {
      const double upper = k(i, j);
      const double lower = k(j, i);
      v.max_offdiagonal = std::max({v.max_offdiagonal, upper, lower});
      const bool ok = strict ? (upper < -tolerance && lower < -tolerance)
                             : (upper <= tolerance && lower <= tolerance);
      if (!ok) v.violations.push_back({i, j});
    }
  }
  if (k.dim() == 1) v.max_offdiagonal = 0.0;
  v.pass = v.diagonal_positive && v.violations.empty();
  return v;
}

SquareMatrix partial_correlations_given_rest(const SquareMatrix& p) {
  const SquareMatrix k = invert(p);
  return SquareMatrix(scale_concentration(k.values(), true), p.labels());
}

double partial_correlation_subset(const SquareMatrix& p, const Label& i,
                                  const Label& j, const std::vector<Label>& given) {
  if (i == j) throw Error(ErrorCode::kLabelClash, "pair needs two distinct items");
  for (const auto& c : given) {
    if (c == i || c == j) {
      throw Error(ErrorCode::kLabelClash,
                  "item '" + c + "' is both in the pair and in the conditioning set");
    }
  }
  std::vector<Label> keep{i, j};
  keep.insert(keep.end(), given.begin(), given.end());
  const SquareMatrix sub = principal_submatrix(p, keep);
  const SquareMatrix partial = partial_correlations_given_rest(sub);
  return partial.at(i, j);
}

const ConditionVerdict* ConditionBattery::find(std::string_view id) const {
  for (const auto& c : conditions) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

std::vector<const ConditionVerdict*> ConditionBattery::failing() const {
  std::vector<const ConditionVerdict*> out;
  for (const auto& c : conditions) {
    if (!c.pass) out.push_back(&c);
  }
  return out;
}

ConditionBattery condition_battery(const SquareMatrix& p, BatteryMode mode,
                                     const BatteryOptions& options) {
  if (p.dim() < 3) {
    throw Error(ErrorCode::kDimensionTooSmall,
                "the battery needs at least three items, got " + std::to_string(p.dim()));
  }
  if (!p.is_symmetric(kSymmetryTolerance)) {
    throw Error(ErrorCode::kAsymmetry, "correlation matrix is not symmetric");
  }
  ConditionBattery b;
  b.mode = mode;
  b.q = p.dim();
  b.necessary_only = mode == BatteryMode::kBinary;
  b.tolerance = options.statistical ? options.tol_stat : options.tol_exact;
  if (b.necessary_only) {
    b.notes.emplace_back(
        "binary items: these correlation conditions are necessary, not sufficient");
  }

  const Judge judge{options};
  if (p.dim() == 3) {
    battery_three_items(b, p, judge);
  } else {
    battery_four_or_more(b, p, judge);
  }

  const auto failing = b.failing();
  if (failing.empty()) {
    b.overall = Conclusion::kConsistent;
  } else {
    const char* pattern_id =
        p.dim() == 3 ? "positive_correlations" : "positive_tetrad_correlations";
    const ConditionVerdict* pattern = b.find(pattern_id);
    b.overall = pattern && pattern->pass ? Conclusion::kHeywood
                                         : Conclusion::kInconsistent;
  }
  return b;
}

}  // namespace startetrad
