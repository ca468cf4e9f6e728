#pragma once

#include <random>

#include "bkeq/model.hpp"

namespace testing {

inline bkeq::Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  bkeq::Matrix M(static_cast<Eigen::Index>(rows.size()),
                 static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double x : row) M(i, j++) = x;
    ++i;
  }
  return M;
}

inline bkeq::ModelSpec running_example() {
  return bkeq::ModelSpec(1, 1, mat({{0.5, 1.0}, {0.0, 0.8}}));
}

inline bkeq::Matrix random_matrix(std::mt19937_64& rng, int dim, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  bkeq::Matrix A(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) A(i, j) = u(rng);
  return A;
}

}  // namespace testing
