#include "startetrad/gaussian_star.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "startetrad/error.hpp"

namespace startetrad {
namespace {

constexpr double kNearZeroCorrelation = 1e-12;
constexpr double kGradientTolerance = 1e-10;
constexpr int kMaxIterations = 500;

Eigen::VectorXd to_vector(const Loadings& lambda) {
  return Eigen::Map<const Eigen::VectorXd>(lambda.values().data(),
                                           static_cast<Eigen::Index>(lambda.size()));
}

void require_unit_diagonal_square(const SquareMatrix& p) {
  if (p.dim() < 3) {
    throw Error(ErrorCode::kDimensionTooSmall,
                "at least three items are needed, got " + std::to_string(p.dim()));
  }
  if (!p.has_unit_diagonal(1e-9)) {
    throw Error(ErrorCode::kNonUnitDiagonal, "correlation matrix diagonal is not 1");
  }
}

void require_positive_offdiagonal(const SquareMatrix& p) {
  for (std::size_t i = 0; i < p.dim(); ++i) {
    for (std::size_t j = i + 1; j < p.dim(); ++j) {
      if (!(p(i, j) > 0.0)) {
        throw Error(ErrorCode::kNegativeCorrelation,
                    "correlation of items " + p.labels()[i] + "," + p.labels()[j] +
                        " is " + std::to_string(p(i, j)) +
                        "; recode items before fitting");
      }
    }
  }
}

// f(lambda) = sum_{i<j} (P_ij - lambda_i lambda_j)^2 and its gradient.
double objective(const Eigen::MatrixXd& p, const Eigen::VectorXd& lambda,
                 Eigen::VectorXd* gradient) {
  const Eigen::Index n = p.rows();
  double f = 0.0;
  if (gradient) gradient->setZero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double r = p(i, j) - lambda(i) * lambda(j);
      f += r * r;
      if (gradient) {
        (*gradient)(i) -= 2.0 * r * lambda(j);
        (*gradient)(j) -= 2.0 * r * lambda(i);
      }
    }
  }
  return f;
}

}  // namespace

std::string_view to_string(LoadingStatus status) {
  switch (status) {
    case LoadingStatus::kProper: return "proper";
    case LoadingStatus::kBoundary: return "boundary";
    case LoadingStatus::kHeywood: return "heywood";
  }
  return "unknown";
}

LoadingStatus classify_loading(double value) {
  if (std::isnan(value)) return LoadingStatus::kHeywood;
  if (value > 1.0 + kBoundaryTolerance) return LoadingStatus::kHeywood;
  if (value >= 1.0 - kBoundaryTolerance) return LoadingStatus::kBoundary;
  if (std::abs(value) <= kZeroLoadingTolerance) return LoadingStatus::kBoundary;
  if (value < 0.0) return LoadingStatus::kHeywood;
  return LoadingStatus::kProper;
}

Loadings::Loadings(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 3) {
    throw Error(ErrorCode::kDimensionTooSmall,
                "loadings need at least three items, got " +
                    std::to_string(values_.size()));
  }
  status_.reserve(values_.size());
  for (double v : values_) status_.push_back(classify_loading(v));
}

bool Loadings::all_proper() const noexcept {
  return std::all_of(status_.begin(), status_.end(),
                     [](LoadingStatus s) { return s == LoadingStatus::kProper; });
}

LoadingStatus Loadings::overall() const noexcept {
  LoadingStatus worst = LoadingStatus::kProper;
  for (auto s : status_) {
    if (s == LoadingStatus::kHeywood) return s;
    if (s == LoadingStatus::kBoundary) worst = s;
  }
  return worst;
}

SquareMatrix build_correlation(const Loadings& lambda) {
  const Eigen::VectorXd l = to_vector(lambda);
  Eigen::MatrixXd p = l * l.transpose();
  p.diagonal().setOnes();
  return SquareMatrix(std::move(p));
}

SquareMatrix build_concentration(const Loadings& lambda) {
  if (!lambda.all_proper()) {
    throw Error(ErrorCode::kImproperLoadings,
                "concentration form needs every loading strictly inside (0, 1)");
  }
  const Eigen::ArrayXd l = to_vector(lambda).array();
  const Eigen::ArrayXd residual_var = 1.0 - l.square();
  const double s = 1.0 + (l.square() / residual_var).sum();
  const Eigen::VectorXd delta = (-l / (std::sqrt(s) * residual_var)).matrix();
  Eigen::MatrixXd k = -delta * delta.transpose();
  k.diagonal() += residual_var.inverse().matrix();
  return SquareMatrix(std::move(k));
}

SquareMatrix build_joint_correlation(const Loadings& lambda) {
  const auto q = static_cast<Eigen::Index>(lambda.size());
  const Eigen::VectorXd l = to_vector(lambda);
  Eigen::MatrixXd psi(q + 1, q + 1);
  psi.topLeftCorner(q, q) = l * l.transpose();
  psi.topLeftCorner(q, q).diagonal().setOnes();
  psi.topRightCorner(q, 1) = l;
  psi.bottomLeftCorner(1, q) = l.transpose();
  psi(q, q) = 1.0;
  auto labels = default_labels(lambda.size());
  labels.emplace_back("L");
  return SquareMatrix(std::move(psi), std::move(labels));
}

Loadings fit_loadings_triple(double r12, double r13, double r23) {
  for (double r : {r12, r13, r23}) {
    if (std::abs(r) < kNearZeroCorrelation) {
      throw Error(ErrorCode::kZeroDenominator,
                  "closed-form loadings need three nonzero correlations");
    }
  }
  auto root = [](double ratio) {
    return ratio < 0.0 ? std::numeric_limits<double>::quiet_NaN() : std::sqrt(ratio);
  };
  return Loadings({root(r12 * r13 / r23), root(r12 * r23 / r13),
                   root(r13 * r23 / r12)});
}

std::vector<double> triad_mean_loadings(const SquareMatrix& p) {
  require_unit_diagonal_square(p);
  require_positive_offdiagonal(p);
  const std::size_t q = p.dim();
  std::vector<double> log_sum(q, 0.0);
  std::vector<int> count(q, 0);
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      for (std::size_t k = j + 1; k < q; ++k) {
        if (j == i || k == i) continue;
        log_sum[i] += 0.5 * std::log(p(i, j) * p(i, k) / p(j, k));
        ++count[i];
      }
    }
  }
  std::vector<double> out(q);
  for (std::size_t i = 0; i < q; ++i) out[i] = std::exp(log_sum[i] / count[i]);
  return out;
}

FactorFit fit_loadings(const SquareMatrix& p) {
  const std::vector<double> start = triad_mean_loadings(p);
  const Eigen::MatrixXd& values = p.values();
  const auto n = static_cast<Eigen::Index>(p.dim());

  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(start.data(), n);
  Eigen::VectorXd g(n);
  double f = objective(values, x, &g);
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);

  int iterations = 0;
  bool converged = g.cwiseAbs().maxCoeff() <= kGradientTolerance;
  while (!converged && iterations < kMaxIterations) {
    ++iterations;
    Eigen::VectorXd direction = -h * g;
    if (direction.dot(g) >= 0.0) {
      h.setIdentity();
      direction = -g;
    }
    // Armijo backtracking.
    double step = 1.0;
    Eigen::VectorXd x_next(n), g_next(n);
    double f_next = 0.0;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      x_next = x + step * direction;
      f_next = objective(values, x_next, &g_next);
      if (f_next <= f + 1e-4 * step * g.dot(direction)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const Eigen::VectorXd s = x_next - x;
    const Eigen::VectorXd y = g_next - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
      h = (id - rho * s * y.transpose()) * h * (id - rho * y * s.transpose()) +
          rho * s * s.transpose();
    }
    x = x_next;
    g = g_next;
    f = f_next;
    converged = g.cwiseAbs().maxCoeff() <= kGradientTolerance;
  }

  Loadings loadings(std::vector<double>(x.data(), x.data() + n));
  Eigen::MatrixXd fitted = x * x.transpose();
  fitted.diagonal().setOnes();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      worst = std::max(worst, std::abs(values(i, j) - fitted(i, j)));
    }
  }
  return FactorFit{std::move(loadings), SquareMatrix(std::move(fitted), p.labels()),
                   worst, iterations, converged};
}

}  // namespace startetrad
