#include "startetrad/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "startetrad/error.hpp"

namespace startetrad {
namespace {

using Json = nlohmann::ordered_json;

constexpr double kWald = 1.96;
constexpr std::array<std::array<std::size_t, 3>, 3> kTriplePairs{{{0, 1, 2}, {0, 2, 1}, {1, 2, 0}}};

std::string fixed4(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string fixed4(const std::optional<double>& v) { return v ? fixed4(*v) : "n/a"; }

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

void write_matrix(std::ostream& os, const SquareMatrix& m) {
  os << "      ";
  for (const auto& l : m.labels()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%9s", l.c_str());
    os << buf;
  }
  os << '\n';
  for (std::size_t i = 0; i < m.dim(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%-6s", m.labels()[i].c_str());
    os << buf;
    for (std::size_t j = 0; j < m.dim(); ++j) {
      std::snprintf(buf, sizeof buf, "%9s", fixed4(m(i, j)).c_str());
      os << buf;
    }
    os << '\n';
  }
}

std::string describe(const Witness& w) {
  std::string out;
  if (!w.items.empty()) out += "(" + join(w.items, ",") + ") = " + fixed4(w.value) + " ";
  return out + w.note;
}

std::string cite(const ConditionVerdict& v) {
  std::string out = v.id + ": " + v.description;
  if (!v.witnesses.empty()) out += "; " + describe(v.witnesses.front());
  return out;
}

void write_condition(std::ostream& os, const ConditionVerdict& v) {
  os << "  [" << (v.pass ? "pass" : "FAIL") << "] " << v.id << ": " << v.description
     << " (statistic " << fixed4(v.statistic) << ", tolerance " << v.tolerance << ")\n";
  for (const auto& w : v.witnesses) os << "         " << describe(w) << '\n';
}

// ---- JSON helpers ----

Json to_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json to_json(const std::optional<double>& v) { return v ? to_json(*v) : Json(nullptr); }

Json to_json(const SquareMatrix& m) {
  Json values = Json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) row.push_back(to_json(m(i, j)));
    values.push_back(std::move(row));
  }
  return Json{{"labels", m.labels()}, {"values", std::move(values)}};
}

Json to_json(const Loadings& l, const std::vector<std::string>& names) {
  Json items = Json::array();
  for (std::size_t i = 0; i < l.size(); ++i) {
    items.push_back(Json{{"item", i < names.size() ? names[i] : std::to_string(i + 1)},
                         {"value", to_json(l[i])},
                         {"status", std::string(to_string(l.status()[i]))}});
  }
  return Json{{"overall", std::string(to_string(l.overall()))},
              {"all_proper", l.all_proper()},
              {"items", std::move(items)}};
}

Json to_json(const ConditionVerdict& v) {
  Json witnesses = Json::array();
  for (const auto& w : v.witnesses) {
    witnesses.push_back(Json{{"items", w.items}, {"value", to_json(w.value)}, {"note", w.note}});
  }
  return Json{{"id", v.id},
              {"description", v.description},
              {"pass", v.pass},
              {"pass_exact", v.pass_exact},
              {"pass_statistical", v.pass_statistical},
              {"statistic", to_json(v.statistic)},
              {"tolerance", v.tolerance},
              {"witnesses", std::move(witnesses)}};
}

Json to_json(const TetradReport& t, const std::vector<Label>& labels) {
  Json residuals = Json::array();
  for (const auto& r : t.residuals) {
    Json idx = Json::array();
    for (auto i : r.indices) idx.push_back(labels[i]);
    residuals.push_back(Json{{"items", std::move(idx)}, {"value", to_json(r.value)}});
  }
  return Json{{"max_abs_residual", to_json(t.max_abs_residual)},
              {"tolerance", t.tolerance},
              {"is_tetrad", t.is_tetrad},
              {"all_positive", t.all_positive},
              {"residuals", std::move(residuals)}};
}

Json to_json(const MMatrixVerdict& m, const std::vector<Label>& labels) {
  Json violations = Json::array();
  for (const auto& v : m.violations) violations.push_back(Json{labels[v[0]], labels[v[1]]});
  return Json{{"pass", m.pass},
              {"strict", m.strict},
              {"diagonal_positive", m.diagonal_positive},
              {"max_offdiagonal", to_json(m.max_offdiagonal)},
              {"tolerance", m.tolerance},
              {"violations", std::move(violations)}};
}

Json to_json(const RankOneResult& r, const std::vector<Label>& labels) {
  Json delta = Json::object();
  for (Eigen::Index i = 0; i < r.delta.size(); ++i) {
    delta[labels[static_cast<std::size_t>(i)]] = to_json(r.delta(i));
  }
  return Json{{"residual", to_json(r.residual)},
              {"delta", std::move(delta)},
              {"delta_in_unit_interval", r.delta_in_unit_interval},
              {"iterations", r.iterations},
              {"converged", r.converged}};
}

Json to_json(const ConditionBattery& b, const std::vector<Label>& labels) {
  Json conditions = Json::array();
  for (const auto& c : b.conditions) conditions.push_back(to_json(c));
  Json out{{"mode", std::string(to_string(b.mode))},
           {"necessary_only", b.necessary_only},
           {"tolerance", b.tolerance},
           {"notes", b.notes},
           {"conditions", std::move(conditions)},
           {"overall", std::string(to_string(b.overall))}};
  out["correlation_tetrads"] =
      b.correlation_tetrads ? to_json(*b.correlation_tetrads, labels) : Json(nullptr);
  out["partial_tetrads"] = b.partial_tetrads ? to_json(*b.partial_tetrads, labels) : Json(nullptr);
  out["concentration_sign"] =
      b.concentration_sign ? to_json(*b.concentration_sign, labels) : Json(nullptr);
  out["rank_one"] = b.rank_one ? to_json(*b.rank_one, labels) : Json(nullptr);
  return out;
}

Json to_json(const StarConditionsVerdict& v) {
  Json slacks = Json::array();
  for (const auto& s : v.slacks) {
    slacks.push_back(Json{{"description", s.description}, {"slack", to_json(s.slack)}});
  }
  return Json{{"pass", v.pass}, {"tolerance", 0.0}, {"slacks", std::move(slacks)}};
}

Json to_json(const Mtp2Verdict& v, const std::vector<std::string>& names) {
  Json checks = Json::array();
  for (const auto& c : v.checks) {
    Json given = Json::object();
    for (const auto& [var, level] : c.given) given[names[var]] = level;
    checks.push_back(Json{{"pair", Json{names[c.i], names[c.j]}},
                          {"given", std::move(given)},
                          {"cross_difference", to_json(c.cross_difference)},
                          {"odds_ratio", to_json(c.odds_ratio)},
                          {"log_odds_z", to_json(c.log_odds_z)},
                          {"pass", c.pass},
                          {"borderline", c.borderline}});
  }
  return Json{{"pass", v.pass}, {"strict", v.strict}, {"borderline_z", 1.96},
              {"checks", std::move(checks)}};
}

Json to_json(const TripleSummary& t) {
  const std::array<std::string, 3>& nm = t.names;
  Json marginal = Json::array();
  Json conditional = Json::array();
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& [a, b, c] = kTriplePairs[k];
    marginal.push_back(Json{{"pair", Json{nm[a], nm[b]}}, {"value", to_json(t.marginal_odds_ratios[k])}});
    conditional.push_back(Json{{"pair", Json{nm[a], nm[b]}},
                               {"given", nm[c]},
                               {"at_0", to_json(t.conditional_odds_ratios[k][0])},
                               {"at_1", to_json(t.conditional_odds_ratios[k][1])}});
  }
  Json out{{"items", Json{nm[0], nm[1], nm[2]}},
           {"marginal_odds_ratios", std::move(marginal)},
           {"conditional_odds_ratios", std::move(conditional)}};
  out["relative_risks"] = t.relative_risks
                              ? Json{{"given_0", to_json(t.relative_risks->first)},
                                     {"given_1", to_json(t.relative_risks->second)}}
                              : Json(nullptr);
  if (t.interactions) {
    Json terms = Json::array();
    for (const auto& term : t.interactions->terms) {
      std::string name;
      for (auto v : term.vars) name += nm[v] + (v == term.vars.back() ? "" : "*");
      terms.push_back(Json{{"term", name},
                           {"estimate", to_json(term.estimate)},
                           {"standard_error", to_json(term.standard_error)},
                           {"studentized", to_json(term.studentized)}});
    }
    out["interactions"] = std::move(terms);
  } else {
    out["interactions"] = nullptr;
  }
  out["star_conditions"] = t.star_conditions ? to_json(*t.star_conditions) : Json(nullptr);
  out["errors"] = t.errors;
  return out;
}

Json options_json(const AnalyzeOptions& o) {
  return Json{{"tol_exact", o.tol_exact},
              {"tol_stat", o.tol_stat},
              {"continuity_correction", o.continuity_correction},
              {"strict_mtp2", o.strict_mtp2}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---- analysis ----

template <typename F>
void attempt(std::vector<std::string>& errors, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    errors.emplace_back(e.what());
  }
}

TripleSummary summarize_triple(const CountTable& t, std::array<std::size_t, 3> items,
                               const AnalyzeOptions& options) {
  TripleSummary s;
  s.items = items;
  for (std::size_t k = 0; k < 3; ++k) s.names[k] = t.names()[items[k]];
  const CountTable m = t.margin({items[0], items[1], items[2]});
  const bool cc = options.continuity_correction;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& [a, b, c] = kTriplePairs[k];
    attempt(s.errors, [&] { s.marginal_odds_ratios[k] = odds_ratio(m, a, b, {}, cc); });
    for (int level = 0; level <= 1; ++level) {
      attempt(s.errors, [&] {
        s.conditional_odds_ratios[k][static_cast<std::size_t>(level)] =
            odds_ratio(m, a, b, {{c, level}}, cc);
      });
    }
  }
  attempt(s.errors, [&] { s.relative_risks = conditional_relative_risks(m); });
  attempt(s.errors, [&] { s.interactions = studentized_interactions(m, cc); });
  attempt(s.errors, [&] { s.star_conditions = q3_star_conditions(m); });
  return s;
}

void add_table_conditions(DiagnosticReport& r) {
  if (r.q == 3 && !r.triples.empty()) {
    const auto& t = r.triples.front();
    ConditionVerdict v;
    v.id = "star_inequalities";
    v.description = "the nine inequalities a binary-root star places on three leaves";
    v.tolerance = 0.0;
    if (t.star_conditions) {
      double smallest = t.star_conditions->slacks.front().slack;
      for (const auto& s : t.star_conditions->slacks) {
        smallest = std::min(smallest, s.slack);
        if (!(s.slack >= 0.0)) v.witnesses.push_back({{}, s.slack, s.description});
      }
      v.statistic = smallest;
      v.pass = t.star_conditions->pass;
    } else {
      v.witnesses.push_back({{}, 0.0, join(t.errors, "; ")});
    }
    v.pass_exact = v.pass_statistical = v.pass;
    r.table_conditions.push_back(std::move(v));
  }

  ConditionVerdict v;
  v.id = "mtp2";
  v.description = r.options.strict_mtp2
                      ? "every pair positively dependent given all other items (strict MTP2)"
                      : "no pair negatively dependent given all other items (MTP2)";
  v.tolerance = 0.0;
  if (r.mtp2) {
    bool significant_failure = false;
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& c : r.mtp2->checks) {
      const double lor = c.odds_ratio ? std::log(*c.odds_ratio) : c.cross_difference;
      smallest = std::min(smallest, lor);
      if (c.pass) continue;
      // For observed data a slice only counts against the model when its
      // negative dependence is significant at the Wald level.
      const bool significant = !(c.log_odds_z && std::abs(*c.log_odds_z) < kWald);
      significant_failure = significant_failure || significant;
      if (r.statistical && !significant) continue;
      std::vector<std::string> given;
      for (const auto& [var, level] : c.given) {
        given.push_back(r.names[var] + "=" + std::to_string(level));
      }
      v.witnesses.push_back({{r.names[c.i], r.names[c.j]},
                             c.odds_ratio ? *c.odds_ratio : c.cross_difference,
                             "conditional odds-ratio given " +
                                 (given.empty() ? std::string("nothing") : join(given, ", "))});
    }
    v.statistic = smallest;
    v.pass_exact = r.mtp2->pass;
    v.pass_statistical = !significant_failure;
    v.pass = r.statistical ? v.pass_statistical : v.pass_exact;
    // Judged on the sign of the cross-product difference, or on the Wald
    // z of a negative log odds-ratio for observed data.
    v.tolerance = r.statistical ? kWald : 0.0;
  }
  r.table_conditions.push_back(std::move(v));
}

void conclude(DiagnosticReport& r) {
  bool tables_ok = true;
  for (const auto& c : r.table_conditions) tables_ok = tables_ok && c.pass;
  r.overall = tables_ok ? r.battery.overall : Conclusion::kInconsistent;
  r.cited.clear();
  if (r.overall == Conclusion::kConsistent) return;
  for (const auto* c : r.battery.failing()) r.cited.push_back(cite(*c));
  for (const auto& c : r.table_conditions) {
    if (!c.pass) r.cited.push_back(cite(c));
  }
}

void finish_common(DiagnosticReport& r, BatteryMode mode) {
  r.battery = condition_battery(
      r.correlations, mode, {r.options.tol_exact, r.options.tol_stat, r.statistical});
  r.partials = r.battery.partials;
  r.loadings = r.battery.loadings;
  if (r.loadings) {
    try {
      // Observed item correlations bordered by the fitted loadings.
      const auto q = static_cast<Eigen::Index>(r.q);
      Eigen::MatrixXd bordered = Eigen::MatrixXd::Identity(q + 1, q + 1);
      bordered.topLeftCorner(q, q) = r.correlations.values();
      for (Eigen::Index i = 0; i < q; ++i) {
        bordered(i, q) = bordered(q, i) = (*r.loadings)[static_cast<std::size_t>(i)];
      }
      auto labels = r.names;
      labels.emplace_back("L");
      r.joint_partials = partial_correlations_given_rest(SquareMatrix(bordered, labels));
    } catch (const Error& e) {
      r.warnings.push_back(std::string("joint item/root partials unavailable: ") + e.what());
    }
  }
}

}  // namespace

DiagnosticReport analyze(const CountTable& t, const AnalyzeOptions& options,
                         std::string source) {
  DiagnosticReport r;
  r.source = std::move(source);
  r.format = "counts";
  r.q = t.q();
  r.n = t.total();
  r.names = t.names();
  r.options = options;
  r.statistical = options.statistical.value_or(true);
  r.correlations = correlation_matrix(t);
  finish_common(r, BatteryMode::kBinary);

  for (std::size_t i = 0; i < t.q(); ++i) {
    for (std::size_t j = i + 1; j < t.q(); ++j) {
      for (std::size_t k = j + 1; k < t.q(); ++k) {
        r.triples.push_back(summarize_triple(t, {i, j, k}, options));
      }
    }
  }
  try {
    r.mtp2 = mtp2_check(t, options.strict_mtp2);
  } catch (const Error& e) {
    r.warnings.push_back(std::string("MTP2 check not possible: ") + e.what());
  }
  add_table_conditions(r);
  conclude(r);
  return r;
}

DiagnosticReport analyze(const CorrelationInput& input, const AnalyzeOptions& options,
                         std::string source) {
  DiagnosticReport r;
  r.source = std::move(source);
  r.format = "corr";
  r.q = input.matrix.dim();
  r.names = input.matrix.labels();
  r.options = options;
  r.statistical = options.statistical.value_or(false);
  r.warnings = input.warnings;
  r.correlations = input.matrix;
  finish_common(r, BatteryMode::kGaussian);
  conclude(r);
  return r;
}

int exit_code(const DiagnosticReport& r) { return r.overall == Conclusion::kConsistent ? 0 : 1; }

std::string render_battery_text(const DiagnosticReport& r) {
  std::ostringstream os;
  os << "Conditions (" << to_string(r.battery.mode) << " mode, "
     << (r.statistical ? "statistical" : "exact") << " tolerance " << r.battery.tolerance
     << (r.battery.necessary_only ? ", necessary conditions only" : "") << ")\n";
  for (const auto& c : r.battery.conditions) write_condition(os, c);
  for (const auto& c : r.table_conditions) write_condition(os, c);
  for (const auto& n : r.battery.notes) os << "  note: " << n << '\n';
  os << "\nConclusion: " << to_string(r.overall) << '\n';
  for (const auto& c : r.cited) os << "  because " << c << '\n';
  return os.str();
}

std::string render_text(const DiagnosticReport& r) {
  std::ostringstream os;
  os << "Input: " << (r.source.empty() ? "<memory>" : r.source) << " (" << r.format
     << "), q = " << r.q;
  if (r.n) os << ", n = " << *r.n;
  os << "\nVariables: " << join(r.names, " ") << "\n";
  for (const auto& w : r.warnings) os << "warning: " << w << '\n';

  os << "\nCorrelations\n";
  write_matrix(os, r.correlations);
  if (r.partials) {
    os << "\nPartial correlations given all other items\n";
    write_matrix(os, *r.partials);
  }
  if (r.loadings) {
    os << "\nLoadings (" << (r.q == 3 ? "closed form" : "least squares") << ")\n";
    for (std::size_t i = 0; i < r.loadings->size(); ++i) {
      os << "  " << r.names[i] << "  " << fixed4((*r.loadings)[i]) << "  "
         << to_string(r.loadings->status()[i]) << '\n';
    }
  }
  if (r.joint_partials) {
    os << "\nPartial correlations given all others, items and root\n";
    write_matrix(os, *r.joint_partials);
  }
  if (r.battery.correlation_tetrads) {
    const auto& t = *r.battery.correlation_tetrads;
    os << "\nTetrad differences: " << t.residuals.size() << ", max |d| = "
       << fixed4(t.max_abs_residual) << " (tolerance " << t.tolerance << ")\n";
  }
  if (r.battery.concentration_sign) {
    const auto& m = *r.battery.concentration_sign;
    os << "Concentration sign pattern: " << (m.pass ? "complete M-matrix" : "not an M-matrix")
       << ", largest off-diagonal " << fixed4(m.max_offdiagonal) << '\n';
  }

  for (const auto& t : r.triples) {
    const auto& nm = t.names;
    os << "\nTriple (" << nm[0] << ", " << nm[1] << ", " << nm[2] << ")\n";
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& [a, b, c] = kTriplePairs[k];
      os << "  OR(" << nm[a] << "," << nm[b] << ") = " << fixed4(t.marginal_odds_ratios[k])
         << ";  given " << nm[c] << "=0: " << fixed4(t.conditional_odds_ratios[k][0])
         << ", " << nm[c] << "=1: " << fixed4(t.conditional_odds_ratios[k][1]) << '\n';
    }
    if (t.relative_risks) {
      os << "  RR(" << nm[0] << " | " << nm[1] << ") given " << nm[2]
         << "=0: " << fixed4(t.relative_risks->first) << ", " << nm[2]
         << "=1: " << fixed4(t.relative_risks->second) << '\n';
    }
    if (t.interactions) {
      os << "  studentized interactions:";
      for (const auto& term : t.interactions->terms) {
        std::string name;
        for (auto v : term.vars) name += nm[v];
        os << "  " << name << " " << fixed4(term.studentized);
      }
      os << '\n';
    }
    if (t.star_conditions) {
      os << "  star inequalities: " << (t.star_conditions->pass ? "hold" : "violated") << '\n';
      for (const auto& s : t.star_conditions->slacks) {
        os << "    " << fixed4(s.slack) << "  " << s.description << '\n';
      }
    }
    for (const auto& e : t.errors) os << "  not computed: " << e << '\n';
  }

  if (r.mtp2) {
    os << "\nConditional dependence given all other items (" << (r.mtp2->strict ? "strict " : "")
       << "MTP2 " << (r.mtp2->pass ? "holds" : "fails") << ")\n";
    for (const auto& c : r.mtp2->checks) {
      std::vector<std::string> given;
      for (const auto& [var, level] : c.given) given.push_back(r.names[var] + "=" + std::to_string(level));
      os << "  (" << r.names[c.i] << "," << r.names[c.j] << ")";
      if (!given.empty()) os << " | " << join(given, ",");
      os << "  OR " << fixed4(c.odds_ratio);
      if (c.log_odds_z) os << "  z " << fixed4(*c.log_odds_z);
      if (c.borderline) os << "  borderline";
      if (!c.pass) os << "  FAIL";
      os << '\n';
    }
  }

  os << '\n' << render_battery_text(r);
  return os.str();
}

std::string render_structured(const DiagnosticReport& r) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = "analysis";
  j["input"] = Json{{"source", r.source},
                    {"format", r.format},
                    {"q", r.q},
                    {"n", r.n ? Json(*r.n) : Json(nullptr)},
                    {"names", r.names}};
  j["options"] = options_json(r.options);
  j["statistical"] = r.statistical;
  j["warnings"] = r.warnings;
  j["correlations"] = to_json(r.correlations);
  j["partial_correlations"] = r.partials ? to_json(*r.partials) : Json(nullptr);
  j["loadings"] = r.loadings ? to_json(*r.loadings, r.names) : Json(nullptr);
  j["joint_partial_correlations"] = r.joint_partials ? to_json(*r.joint_partials) : Json(nullptr);
  j["battery"] = to_json(r.battery, r.correlations.labels());
  Json triples = Json::array();
  for (const auto& t : r.triples) triples.push_back(to_json(t));
  j["triples"] = std::move(triples);
  j["mtp2"] = r.mtp2 ? to_json(*r.mtp2, r.names) : Json(nullptr);
  Json table_conditions = Json::array();
  for (const auto& c : r.table_conditions) table_conditions.push_back(to_json(c));
  j["table_conditions"] = std::move(table_conditions);
  j["conclusion"] = Json{{"overall", std::string(to_string(r.overall))}, {"cited", r.cited}};
  return dump(j);
}

FitReport fit_report(const SquareMatrix& p, std::string source) {
  if (p.dim() == 3) {
    return {std::move(source), "closed_form", p, fit_loadings_triple(p(0, 1), p(0, 2), p(1, 2)),
            std::nullopt, 0, true};
  }
  FactorFit fit = fit_loadings(p);
  return {std::move(source), "least_squares", p, std::move(fit.loadings),
          fit.max_offdiag_residual, fit.iterations, fit.converged};
}

int exit_code(const FitReport& r) { return r.loadings.all_proper() ? 0 : 1; }

std::string render_text(const FitReport& r) {
  std::ostringstream os;
  os << "Loadings (" << (r.method == "closed_form" ? "closed form" : "least squares") << ")";
  if (!r.source.empty()) os << " for " << r.source;
  os << '\n';
  const auto& labels = r.correlations.labels();
  for (std::size_t i = 0; i < r.loadings.size(); ++i) {
    os << "  " << labels[i] << "  " << fixed4(r.loadings[i]) << "  "
       << to_string(r.loadings.status()[i]) << '\n';
  }
  if (r.max_offdiag_residual) {
    os << "max off-diagonal residual " << fixed4(*r.max_offdiag_residual) << ", "
       << r.iterations << " iterations" << (r.converged ? "" : " (not converged)") << '\n';
  }
  for (std::size_t i = 0; i < r.loadings.size(); ++i) {
    const double v = r.loadings[i];
    switch (r.loadings.status()[i]) {
      case LoadingStatus::kProper:
        break;
      case LoadingStatus::kBoundary:
        os << "Heywood case (boundary): loading of item " << labels[i] << " is " << fixed4(v)
           << '\n';
        break;
      case LoadingStatus::kHeywood:
        if (std::isnan(v)) {
          os << "Heywood case: loading of item " << labels[i]
             << " is the root of a negative ratio\n";
        } else {
          os << "Heywood case: loading of item " << labels[i] << " is " << fixed4(v)
             << (v > 1.0 ? ", above one\n" : ", negative\n");
        }
        break;
    }
  }
  if (r.loadings.all_proper()) os << "All loadings are proper.\n";
  return os.str();
}

std::string render_structured(const FitReport& r) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = "fit";
  j["source"] = r.source;
  j["method"] = r.method;
  j["correlations"] = to_json(r.correlations);
  j["loadings"] = to_json(r.loadings, r.correlations.labels());
  j["max_offdiag_residual"] = to_json(r.max_offdiag_residual);
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  return dump(j);
}

ReconstructReport reconstruct_report(const MarginSystem& ms, std::optional<std::int64_t> total) {
  const auto cells = reconstruct_cells(ms);
  return {ms, total, cells, reconstruct_from_pairwise(ms)};
}

std::string render_text(const ReconstructReport& r) {
  std::ostringstream os;
  const std::array<std::string, 3> nm{r.margins.ab.names()[0], r.margins.ab.names()[1],
                                      r.margins.ac.names()[1]};
  os << "Cells with zero third central moment (" << nm[0] << " " << nm[1] << " " << nm[2]
     << ", first fastest)\n";
  for (std::size_t c = 0; c < 8; ++c) {
    os << "  " << level_of(c, 0) << level_of(c, 1) << level_of(c, 2) << "  "
       << fixed4(r.cells[c]);
    if (r.total) os << "  " << fixed4(r.cells[c] * static_cast<double>(*r.total));
    os << '\n';
  }
  if (r.feasible()) {
    os << "Feasible: every cell is nonnegative.\n";
  } else {
    const auto& cert = std::get<InfeasibilityCertificate>(r.result);
    std::vector<std::string> cells;
    for (auto c : cert.negative_cells) {
      cells.push_back(std::to_string(level_of(c, 0)) + std::to_string(level_of(c, 1)) +
                      std::to_string(level_of(c, 2)));
    }
    os << "Infeasible: negative cells " << join(cells, ", ") << '\n';
  }
  return os.str();
}

std::string render_structured(const ReconstructReport& r) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = "reconstruction";
  j["names"] = Json{r.margins.ab.names()[0], r.margins.ab.names()[1], r.margins.ac.names()[1]};
  j["total"] = r.total ? Json(*r.total) : Json(nullptr);
  Json cells = Json::array();
  for (double c : r.cells) cells.push_back(to_json(c));
  j["cells"] = std::move(cells);
  j["feasible"] = r.feasible();
  if (r.feasible()) {
    j["negative_cells"] = Json::array();
  } else {
    j["negative_cells"] = std::get<InfeasibilityCertificate>(r.result).negative_cells;
  }
  j["negative_tolerance"] = 1e-12;
  return dump(j);
}

std::string render_text(const SimulationReport& r) {
  if (const auto* t = std::get_if<CountTable>(&r.result)) return format_count_vector(*t);
  return format_correlation_matrix(std::get<SquareMatrix>(r.result));
}

std::string render_structured(const SimulationReport& r) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = "simulation";
  j["model"] = r.model;
  j["seed"] = r.seed;
  j["n"] = r.n;
  if (const auto* t = std::get_if<CountTable>(&r.result)) {
    j["names"] = t->names();
    j["counts"] = t->counts();
  } else {
    j["correlations"] = to_json(std::get<SquareMatrix>(r.result));
  }
  return dump(j);
}

}  // namespace startetrad
