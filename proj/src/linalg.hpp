#pragma once

// Small SVD-based helpers shared by the numerical modules.

#include <Eigen/Dense>
#include <algorithm>
#include <complex>

namespace bkeq::detail {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

inline double sigma_max(const Eigen::VectorXd& sv) {
  return sv.size() == 0 ? 0.0 : sv(0);
}

/// Count of singular values strictly above threshold.
inline int rank_above(const Eigen::VectorXd& sv, double threshold) {
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold) ++r;
  }
  return r;
}

/// sigma_min / sigma_max; 0 for singular or empty-with-zero matrices.
template <typename Derived>
double inverse_condition(const Eigen::MatrixBase<Derived>& M) {
  if (M.rows() == 0 || M.cols() == 0) return 1.0;
  Eigen::JacobiSVD<Mat<typename Derived::Scalar>> svd(M);
  const auto& sv = svd.singularValues();
  const double hi = sv(0);
  if (!(hi > 0.0)) return 0.0;
  return sv(sv.size() - 1) / hi;
}

template <typename Derived>
double spectral_norm(const Eigen::MatrixBase<Derived>& M) {
  if (M.rows() == 0 || M.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Mat<typename Derived::Scalar>> svd(M);
  return svd.singularValues()(0);
}

/// Orthonormal basis of range(M), rank judged against threshold.
template <typename Scalar>
Mat<Scalar> orthonormal_range(const Mat<Scalar>& M, double threshold) {
  if (M.cols() == 0) return Mat<Scalar>(M.rows(), 0);
  Eigen::JacobiSVD<Mat<Scalar>> svd(M, Eigen::ComputeFullU);
  const int r = rank_above(svd.singularValues(), threshold);
  return svd.matrixU().leftCols(r);
}

}  // namespace bkeq::detail
