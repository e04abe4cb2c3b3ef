#pragma once

#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "startetrad/matrix.hpp"

namespace startetrad::testing {

inline std::string data_path(const std::string& name) {
  return std::string(STARTETRAD_DATA_DIR) + "/" + name;
}

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(gen);
}

// B B^T + I with B uniform on (-1, 1).
inline SquareMatrix random_spd(std::mt19937_64& gen, std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd b(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) b(i, j) = uniform(gen, -1.0, 1.0);
  return SquareMatrix(b * b.transpose() + Eigen::MatrixXd::Identity(n, n));
}

}  // namespace startetrad::testing
