#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bkeq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Numeric tolerances. All must lie in (0, 1e-2).
struct Tolerances {
  /// |lambda| within this of 1 is labelled Boundary.
  double unit_margin = 1e-9;
  /// Eigenvalues closer than cluster_tol * ||A||_F are merged.
  double cluster_tol = 1e-8;
  /// Singular values below rank_tol * sigma_max count as zero.
  double rank_tol = 1e-10;
  /// Bound on the scaled Riccati residual of an accepted equilibrium.
  double residual_tol = 1e-8;

  void validate() const;
  bool operator==(const Tolerances&) const = default;
};

/// Tolerance overrides; unset fields keep the model's values.
struct ToleranceOverrides {
  std::optional<double> unit_margin;
  std::optional<double> cluster_tol;
  std::optional<double> rank_tol;
  std::optional<double> residual_tol;

  Tolerances apply(Tolerances base) const;
};

/// The problem instance x_{t+1} = A x_t. The first n states are
/// predetermined (k), the last m are non-predetermined (q).
class ModelSpec {
 public:
  ModelSpec(int n, int m, Matrix A, std::vector<std::string> names = {},
            Tolerances tol = {});

  int n() const { return n_; }
  int m() const { return m_; }
  int size() const { return n_ + m_; }
  const Matrix& A() const { return A_; }
  const std::vector<std::string>& names() const { return names_; }
  const Tolerances& tol() const { return tol_; }

  /// Same model with different tolerances.
  ModelSpec with_tolerances(const Tolerances& tol) const;

 private:
  int n_;
  int m_;
  Matrix A_;
  std::vector<std::string> names_;
  Tolerances tol_;
};

/// The four contiguous sub-blocks of A under the (n, m) split.
struct Blocks {
  Matrix nn;
  Matrix nm;
  Matrix mn;
  Matrix mm;

  int n() const { return static_cast<int>(nn.rows()); }
  int m() const { return static_cast<int>(mm.rows()); }
  Matrix assemble() const;
};

/// Parses a model document (JSON text). Throws InputError with a
/// user-facing diagnostic on any schema or validation failure.
ModelSpec load_model(std::string_view document);
ModelSpec load_model_file(const std::filesystem::path& path);

Blocks partition_blocks(const ModelSpec& spec);

}  // namespace bkeq
