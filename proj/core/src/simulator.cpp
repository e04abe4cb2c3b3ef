#include "startetrad/simulator.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "startetrad/error.hpp"

namespace startetrad {
namespace {

double uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

double normal(std::mt19937_64& gen) {
  const double u1 = uniform(gen);
  const double u2 = uniform(gen);
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void BinaryStarModel::validate() const {
  if (succ_given_root.empty()) throw Error(ErrorCode::kInvalidArgument, "model has no items");
  if (!is_probability(root_prior)) {
    throw Error(ErrorCode::kInvalidArgument, "root prior outside [0, 1]");
  }
  for (std::size_t i = 0; i < succ_given_root.size(); ++i) {
    const auto& [p0, p1] = succ_given_root[i];
    if (!is_probability(p0) || !is_probability(p1)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "item " + std::to_string(i + 1) + " has a probability outside [0, 1]", i);
    }
  }
}

bool BinaryStarModel::positive_dependence() const noexcept {
  for (const auto& [p0, p1] : succ_given_root) {
    if (!(p1 > p0)) return false;
  }
  return true;
}

ExactTables exact_tables(const BinaryStarModel& model) {
  model.validate();
  const std::size_t q = model.q();
  const std::size_t leaf_cells = std::size_t{1} << q;
  std::vector<double> joint(2 * leaf_cells, 0.0);
  for (std::size_t cell = 0; cell < joint.size(); ++cell) {
    const int root = level_of(cell, q);
    double p = root == 1 ? model.root_prior : 1.0 - model.root_prior;
    for (std::size_t i = 0; i < q; ++i) {
      const double succ = root == 1 ? model.succ_given_root[i].second
                                    : model.succ_given_root[i].first;
      p *= level_of(cell, i) == 1 ? succ : 1.0 - succ;
    }
    joint[cell] = p;
  }
  std::vector<double> leaves(leaf_cells);
  for (std::size_t cell = 0; cell < leaf_cells; ++cell) {
    leaves[cell] = joint[cell] + joint[cell + leaf_cells];
  }
  auto names = default_variable_names(q);
  auto leaf_names = names;
  names.push_back("L");
  return {ProbTable(q + 1, std::move(joint), std::move(names)),
          ProbTable(q, std::move(leaves), std::move(leaf_names))};
}

std::vector<double> item_root_correlations(const BinaryStarModel& model) {
  const auto tables = exact_tables(model);
  const std::size_t q = model.q();
  std::vector<double> out;
  out.reserve(q);
  for (std::size_t i = 0; i < q; ++i) {
    out.push_back(phi_correlation(to_2x2(tables.joint.margin({i, q}))).value());
  }
  return out;
}

CountTable sample(const BinaryStarModel& model, std::int64_t n, std::uint64_t seed) {
  model.validate();
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "sample size must be >= 1");
  const std::size_t q = model.q();
  std::vector<std::int64_t> counts(std::size_t{1} << q, 0);
  std::mt19937_64 gen(seed);
  for (std::int64_t obs = 0; obs < n; ++obs) {
    const bool root = uniform(gen) < model.root_prior;
    std::size_t cell = 0;
    for (std::size_t i = 0; i < q; ++i) {
      const double succ = root ? model.succ_given_root[i].second : model.succ_given_root[i].first;
      if (uniform(gen) < succ) cell |= std::size_t{1} << i;
    }
    ++counts[cell];
  }
  return CountTable(q, std::move(counts));
}

Eigen::MatrixXd sample_gaussian(const GaussianStarModel& model, std::size_t n,
                                std::uint64_t seed) {
  if (!model.loadings.all_proper()) {
    throw Error(ErrorCode::kImproperLoadings, "sampling needs proper loadings");
  }
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "sample size must be >= 1");
  const auto q = static_cast<Eigen::Index>(model.loadings.size());
  Eigen::MatrixXd data(static_cast<Eigen::Index>(n), q);
  std::vector<double> noise_scale(static_cast<std::size_t>(q));
  for (Eigen::Index i = 0; i < q; ++i) {
    const double l = model.loadings[static_cast<std::size_t>(i)];
    noise_scale[static_cast<std::size_t>(i)] = std::sqrt(1.0 - l * l);
  }
  std::mt19937_64 gen(seed);
  for (Eigen::Index row = 0; row < data.rows(); ++row) {
    const double root = normal(gen);
    for (Eigen::Index i = 0; i < q; ++i) {
      data(row, i) = model.loadings[static_cast<std::size_t>(i)] * root +
                     noise_scale[static_cast<std::size_t>(i)] * normal(gen);
    }
  }
  return data;
}

SquareMatrix sample_correlation(const Eigen::MatrixXd& data) {
  if (data.rows() < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two rows");
  if (data.cols() < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one column");
  const Eigen::MatrixXd centred = data.rowwise() - data.colwise().mean();
  const Eigen::MatrixXd cov = centred.transpose() * centred;
  const Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
  for (Eigen::Index i = 0; i < sd.size(); ++i) {
    if (!(sd(i) > 0.0)) {
      throw Error(ErrorCode::kDegenerateMargin,
                  "column " + std::to_string(i + 1) + " is constant", static_cast<std::size_t>(i));
    }
  }
  Eigen::MatrixXd r = sd.cwiseInverse().asDiagonal() * cov * sd.cwiseInverse().asDiagonal();
  r.diagonal().setOnes();
  r = 0.5 * (r + r.transpose());
  return SquareMatrix(std::move(r));
}

}  // namespace startetrad
