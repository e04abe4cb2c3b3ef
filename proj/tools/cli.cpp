#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <ostream>

#include <CLI11.hpp>

#include "startetrad/error.hpp"
#include "startetrad/io.hpp"
#include "startetrad/report.hpp"
#include "startetrad/simulator.hpp"

namespace startetrad::cli {
namespace {

enum class Format { kAuto, kCounts, kCorr, kRaw };
enum class Output { kText, kStructured };

struct Common {
  std::string input;
  Format format = Format::kAuto;
  Output output = Output::kText;
};

const std::map<std::string, Format> kFormats{
    {"counts", Format::kCounts}, {"corr", Format::kCorr}, {"raw", Format::kRaw}};
const std::map<std::string, Output> kOutputs{{"text", Output::kText},
                                             {"structured", Output::kStructured}};

void add_common(CLI::App& sub, Common& c, bool input_required = true) {
  auto* in = sub.add_option("--input", c.input, "input file")->check(CLI::ExistingFile);
  if (input_required) in->required();
  sub.add_option("--format", c.format, "counts | corr | raw (default: from the file extension)")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));
  sub.add_option("--output", c.output, "text | structured")
      ->transform(CLI::CheckedTransformer(kOutputs, CLI::ignore_case));
}

Format resolve(const Common& c) {
  if (c.format != Format::kAuto) return c.format;
  const auto ext = std::filesystem::path(c.input).extension().string();
  if (ext == ".corr") return Format::kCorr;
  if (ext == ".raw" || ext == ".csv") return Format::kRaw;
  return Format::kCounts;
}

std::variant<CountTable, CorrelationInput> load(const Common& c) {
  switch (resolve(c)) {
    case Format::kCorr: return read_correlation_matrix(c.input);
    case Format::kRaw: return read_raw_binary(c.input);
    default: return read_count_vector(c.input);
  }
}

void add_tolerances(CLI::App& sub, AnalyzeOptions& o) {
  sub.add_option("--tol-exact", o.tol_exact, "tolerance for exact conditions")
      ->check(CLI::NonNegativeNumber);
  sub.add_option("--tol-stat", o.tol_stat, "tolerance for residuals of observed data")
      ->check(CLI::NonNegativeNumber);
  sub.add_flag("--continuity-correction", o.continuity_correction,
               "add 0.5 to cells for odds-ratios and interactions");
  sub.add_flag("--strict-mtp2", o.strict_mtp2, "require strictly positive conditional dependence");
}

DiagnosticReport run_analysis(const Common& c, const AnalyzeOptions& o) {
  auto data = load(c);
  if (auto* t = std::get_if<CountTable>(&data)) return analyze(*t, o, c.input);
  return analyze(std::get<CorrelationInput>(data), o, c.input);
}

std::optional<std::int64_t> common_total(const CountTable& a, const CountTable& b,
                                         const CountTable& c) {
  if (a.total() == b.total() && b.total() == c.total()) return a.total();
  return std::nullopt;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diagnostics for single latent-variable (star graph) models of item correlations "
               "and binary tables",
               "startetrad"};
  app.require_subcommand(1);

  Common analyze_io;
  AnalyzeOptions analyze_opts;
  auto* analyze_cmd = app.add_subcommand("analyze", "full diagnostic report");
  add_common(*analyze_cmd, analyze_io);
  add_tolerances(*analyze_cmd, analyze_opts);

  Common check_io;
  AnalyzeOptions check_opts;
  auto* check_cmd = app.add_subcommand("check", "condition battery and conclusion only");
  add_common(*check_cmd, check_io);
  add_tolerances(*check_cmd, check_opts);

  Common fit_io;
  auto* fit_cmd = app.add_subcommand("fit", "single-factor loadings and their status");
  add_common(*fit_cmd, fit_io);

  Common sim_io;
  std::string model = "binary";
  double prior = 0.5;
  std::vector<double> p0, p1, loadings;
  std::int64_t n = 1000;
  std::uint64_t seed = 1;
  auto* sim_cmd = app.add_subcommand("simulate", "sample from a star model");
  sim_cmd->add_option("--output", sim_io.output, "text | structured")
      ->transform(CLI::CheckedTransformer(kOutputs, CLI::ignore_case));
  sim_cmd->add_option("--model", model, "binary | gaussian")
      ->check(CLI::IsMember({"binary", "gaussian"}));
  sim_cmd->add_option("--prior", prior, "Pr(L = 1) for the binary model");
  sim_cmd->add_option("--p0", p0, "Pr(X_i = 1 | L = 0) per item")->delimiter(',');
  sim_cmd->add_option("--p1", p1, "Pr(X_i = 1 | L = 1) per item")->delimiter(',');
  sim_cmd->add_option("--loadings", loadings, "item-root correlations for the gaussian model")
      ->delimiter(',');
  sim_cmd->add_option("--n", n, "number of observations")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", seed, "generator seed");

  Common rec_io;
  std::string ab, ac, bc;
  auto* rec_cmd = app.add_subcommand(
      "reconstruct", "three-way table from its two-way margins, third central moment zero");
  add_common(*rec_cmd, rec_io, false);
  rec_cmd->add_option("--ab", ab, "(A,B) count table")->check(CLI::ExistingFile);
  rec_cmd->add_option("--ac", ac, "(A,C) count table")->check(CLI::ExistingFile);
  rec_cmd->add_option("--bc", bc, "(B,C) count table")->check(CLI::ExistingFile);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (analyze_cmd->parsed() || check_cmd->parsed()) {
      const bool full = analyze_cmd->parsed();
      const auto report = run_analysis(full ? analyze_io : check_io,
                                       full ? analyze_opts : check_opts);
      const auto output = (full ? analyze_io : check_io).output;
      if (output == Output::kStructured) {
        out << render_structured(report);
      } else {
        out << (full ? render_text(report) : render_battery_text(report));
      }
      return exit_code(report);
    }

    if (fit_cmd->parsed()) {
      auto data = load(fit_io);
      const SquareMatrix p = std::holds_alternative<CountTable>(data)
                                 ? correlation_matrix(std::get<CountTable>(data))
                                 : std::get<CorrelationInput>(data).matrix;
      const auto report = fit_report(p, fit_io.input);
      out << (fit_io.output == Output::kStructured ? render_structured(report)
                                                   : render_text(report));
      return exit_code(report);
    }

    if (sim_cmd->parsed()) {
      std::variant<CountTable, SquareMatrix> result = SquareMatrix::identity(1);
      if (model == "binary") {
        if (p0.size() != p1.size()) {
          throw Error(ErrorCode::kInvalidArgument, "--p0 and --p1 need the same number of items");
        }
        BinaryStarModel m{prior, {}};
        for (std::size_t i = 0; i < p0.size(); ++i) m.succ_given_root.emplace_back(p0[i], p1[i]);
        result = sample(m, n, seed);
      } else {
        const GaussianStarModel m{Loadings(loadings)};
        result = sample_correlation(sample_gaussian(m, static_cast<std::size_t>(n), seed));
      }
      const SimulationReport report{model, seed, n, std::move(result)};
      out << (sim_io.output == Output::kStructured ? render_structured(report)
                                                   : render_text(report));
      return 0;
    }

    if (rec_cmd->parsed()) {
      std::optional<ReconstructReport> report;
      if (!ab.empty() || !ac.empty() || !bc.empty()) {
        if (ab.empty() || ac.empty() || bc.empty()) {
          throw Error(ErrorCode::kInvalidArgument, "--ab, --ac and --bc go together");
        }
        const auto tab = read_count_vector(ab), tac = read_count_vector(ac),
                   tbc = read_count_vector(bc);
        report = reconstruct_report(MarginSystem::from_counts(tab, tac, tbc),
                                    common_total(tab, tac, tbc));
      } else if (!rec_io.input.empty()) {
        const auto t = read_count_vector(rec_io.input);
        report = reconstruct_report(MarginSystem::from_joint(ProbTable::from_counts(t)), t.total());
      } else {
        throw Error(ErrorCode::kInvalidArgument, "give --ab, --ac, --bc or a three-way --input");
      }
      out << (rec_io.output == Output::kStructured ? render_structured(*report)
                                                   : render_text(*report));
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace startetrad::cli
