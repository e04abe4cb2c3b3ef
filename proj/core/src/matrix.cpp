#include "startetrad/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "startetrad/error.hpp"

namespace startetrad {
namespace {

constexpr int kRankOneMaxIterations = 200;
constexpr double kRankOneTolerance = 1e-10;

Eigen::Index as_index(std::size_t i) { return static_cast<Eigen::Index>(i); }

// Single-index partial inversion, in place.
void invert_on_index(Eigen::MatrixXd& m, Eigen::Index k, double pivot_tol) {
  const double scale = m.cwiseAbs().maxCoeff();
  const double s = m(k, k);
  if (!(std::abs(s) > pivot_tol * scale)) {
    throw Error(ErrorCode::kSingularPivot,
                "pivot " + std::to_string(s) + " at position " +
                    std::to_string(k),
                static_cast<std::size_t>(k));
  }
  const Eigen::VectorXd col = m.col(k);
  const Eigen::RowVectorXd row = m.row(k);
  m.noalias() -= col * row / s;
  m.col(k) = col / s;
  m.row(k) = -row / s;
  m(k, k) = 1.0 / s;
}

}  // namespace

std::vector<Label> default_labels(std::size_t dim) {
  std::vector<Label> labels;
  labels.reserve(dim);
  for (std::size_t i = 1; i <= dim; ++i) labels.push_back(std::to_string(i));
  return labels;
}

SquareMatrix::SquareMatrix(Eigen::MatrixXd values)
    : SquareMatrix(values, default_labels(static_cast<std::size_t>(values.rows()))) {}

SquareMatrix::SquareMatrix(Eigen::MatrixXd values, std::vector<Label> labels)
    : values_(std::move(values)), labels_(std::move(labels)) {
  if (values_.rows() != values_.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "matrix is not square");
  }
  if (values_.rows() < 1) {
    throw Error(ErrorCode::kInvalidArgument, "matrix dimension must be >= 1");
  }
  if (labels_.size() != static_cast<std::size_t>(values_.rows())) {
    throw Error(ErrorCode::kInvalidArgument,
                "label count does not match matrix dimension");
  }
  std::set<std::string_view> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) {
      throw Error(ErrorCode::kLabelClash, "duplicate label '" + l + "'");
    }
  }
}

SquareMatrix SquareMatrix::identity(std::size_t dim) {
  return SquareMatrix(Eigen::MatrixXd::Identity(as_index(dim), as_index(dim)));
}

SquareMatrix SquareMatrix::identity(std::vector<Label> labels) {
  const auto n = as_index(labels.size());
  return SquareMatrix(Eigen::MatrixXd::Identity(n, n), std::move(labels));
}

double SquareMatrix::at(std::string_view row, std::string_view col) const {
  return (*this)(index_of(row), index_of(col));
}

std::size_t SquareMatrix::index_of(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) {
    throw Error(ErrorCode::kUnknownLabel,
                "label '" + std::string(label) + "' not in matrix");
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

bool SquareMatrix::has_label(std::string_view label) const noexcept {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

bool SquareMatrix::is_symmetric(double tol) const {
  return (values_ - values_.transpose()).cwiseAbs().maxCoeff() <= tol;
}

bool SquareMatrix::has_unit_diagonal(double tol) const {
  return (values_.diagonal().array() - 1.0).abs().maxCoeff() <= tol;
}

double SquareMatrix::max_abs() const { return values_.cwiseAbs().maxCoeff(); }

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "dimension mismatch");
  }
  return (a - b).cwiseAbs().maxCoeff();
}

double max_abs_diff(const SquareMatrix& a, const SquareMatrix& b) {
  return max_abs_diff(a.values(), b.values());
}

PartialInversionResult partial_invert(const SquareMatrix& m,
                                      const std::vector<Label>& set,
                                      double pivot_tolerance) {
  std::vector<Eigen::Index> positions;
  positions.reserve(set.size());
  for (const auto& label : set) {
    const auto k = as_index(m.index_of(label));
    if (std::find(positions.begin(), positions.end(), k) != positions.end()) {
      throw Error(ErrorCode::kLabelClash,
                  "label '" + label + "' listed twice in inversion set");
    }
    positions.push_back(k);
  }
  Eigen::MatrixXd work = m.values();
  for (const auto k : positions) invert_on_index(work, k, pivot_tolerance);
  return {SquareMatrix(std::move(work), m.labels()), set};
}

SquareMatrix invert(const SquareMatrix& m) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m.values());
  const double rcond = lu.rcond();
  if (!(rcond > 1.0 / kConditionBound)) {
    throw Error(ErrorCode::kSingularMatrix,
                "reciprocal condition estimate " + std::to_string(rcond));
  }
  return SquareMatrix(lu.inverse(), m.labels());
}

SquareMatrix principal_submatrix(const SquareMatrix& m,
                                 const std::vector<Label>& keep) {
  if (keep.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty label subset");
  }
  std::vector<bool> selected(m.dim(), false);
  for (const auto& label : keep) selected[m.index_of(label)] = true;

  std::vector<Eigen::Index> rows;
  std::vector<Label> labels;
  for (std::size_t i = 0; i < m.dim(); ++i) {
    if (selected[i]) {
      rows.push_back(as_index(i));
      labels.push_back(m.labels()[i]);
    }
  }
  const auto n = as_index(rows.size());
  Eigen::MatrixXd sub(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) sub(r, c) = m.values()(rows[r], rows[c]);
  }
  return SquareMatrix(std::move(sub), std::move(labels));
}

RankOneResult rank_one_residual(const SquareMatrix& p) {
  const Eigen::MatrixXd& values = p.values();
  const Eigen::Index n = values.rows();

  // Starting communalities from triads: the least-squares solution of
  // p_ij p_ik = c_i p_jk over pairs j < k, exact for a rank-one pattern.
  // Squared multiple correlations fill in when every p_jk vanishes.
  Eigen::VectorXd communality = Eigen::VectorXd::Zero(n);
  std::vector<bool> have(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    double num = 0.0, den = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = j + 1; k < n; ++k) {
        if (j == i || k == i) continue;
        num += values(i, j) * values(i, k) * values(j, k);
        den += values(j, k) * values(j, k);
      }
    }
    if (den > 1e-24) {
      communality(i) = std::max(num / den, 0.0);
      have[static_cast<std::size_t>(i)] = true;
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(values);
  const bool invertible = lu.rcond() > 1.0 / kConditionBound;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (have[static_cast<std::size_t>(i)]) continue;
    if (invertible) {
      communality(i) = 1.0 - 1.0 / lu.inverse()(i, i);
    } else {
      double best = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j != i) best = std::max(best, std::abs(values(i, j)));
      }
      communality(i) = best;
    }
  }

  RankOneResult out;
  Eigen::MatrixXd deflated = values;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(n);
  for (int it = 1; it <= kRankOneMaxIterations; ++it) {
    deflated.diagonal() = communality;
    eig.compute(deflated);
    const double top = std::max(eig.eigenvalues()(n - 1), 0.0);
    lambda = std::sqrt(top) * eig.eigenvectors().col(n - 1);
    if (lambda.sum() < 0.0) lambda = -lambda;
    const Eigen::VectorXd next = lambda.array().square();
    const double change = (next - communality).cwiseAbs().maxCoeff();
    communality = next;
    out.iterations = it;
    if (change <= kRankOneTolerance) {
      out.converged = true;
      break;
    }
  }

  deflated.diagonal() = communality;
  eig.compute(deflated);
  const double top = eig.eigenvalues()(n - 1);
  const Eigen::VectorXd v = eig.eigenvectors().col(n - 1);
  out.residual = (deflated - top * v * v.transpose()).cwiseAbs().maxCoeff();
  out.delta = (1.0 - communality.array()).matrix();
  out.loadings = lambda;
  out.delta_in_unit_interval =
      (out.delta.array() > 0.0).all() && (out.delta.array() < 1.0).all();
  return out;
}

}  // namespace startetrad
