#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bkeq/model.hpp"
#include "bkeq/spectral.hpp"

namespace bkeq {

enum class SelectionMode { RealOnly, AllowComplex };

/// A leading prefix of one Jordan chain.
struct Pick {
  std::size_t cluster = 0;
  std::size_t chain = 0;
  std::size_t prefix = 0;

  auto operator<=>(const Pick&) const = default;
};

/// n stable chain-prefix columns: one candidate equilibrium.
struct Selection {
  std::vector<Pick> picks;
  bool conjugate_closed = false;
  /// (n+m) x n, columns in pick order, chain vectors in chain order.
  CMatrix columns;
  /// Eigenvalue of each column.
  std::vector<Complex> eigenvalues;
};

/// q = -N k, with N of shape m x n.
struct Equilibrium {
  CMatrix N;
  bool real = true;
  Selection selection;
  std::vector<Complex> closed_loop_eigenvalues;
  double residual_norm = 0.0;
  /// sigma_max / sigma_min of P_nn.
  double pnn_condition = 1.0;

  /// Real part of N; meaningful when real is true.
  Matrix N_real() const { return N.real(); }
};

enum class RejectionReason {
  SingularPnn,
  ComplexInRealMode,
  ResidualFailure,
  SpectrumMismatch,
  Duplicate,
};

const char* to_string(RejectionReason r);

struct Rejection {
  RejectionReason reason;
  Selection selection;
  double pnn_condition = 0.0;
  std::string detail;
};

using BuildResult = std::variant<Equilibrium, Rejection>;

/// T = [[I, 0], [-N, I]] and its inverse [[I, 0], [N, I]].
struct TransformPair {
  CMatrix T;
  CMatrix T_inv;
};

/// All selections of n stable chain-prefix columns, sorted
/// lexicographically by their pick lists. RealOnly keeps only selections
/// closed under conjugation. Boundary clusters are never picked.
std::vector<Selection> enumerate_selections(const Spectrum& spectrum, int n,
                                            SelectionMode mode);

/// Assembles the columns of a pick list.
Selection make_selection(const Spectrum& spectrum, std::vector<Pick> picks);

/// N = -P_mn P_nn^{-1} from the selected columns, verified before return.
BuildResult build_equilibrium(const Selection& selection, const Blocks& blocks,
                              const Tolerances& tol, SelectionMode mode);

/// A_mn + N A_nn - A_mm N - N A_nm N, the lower-left block of T^{-1} A T.
CMatrix riccati_map(const CMatrix& N, const Blocks& blocks);

/// ||riccati_map(N)||_F / ((1 + ||A||_F) (1 + ||N||_F)^2).
double riccati_residual(const CMatrix& N, const Blocks& blocks);
double riccati_residual(const Matrix& N, const Blocks& blocks);

TransformPair transform_pair(const CMatrix& N);

/// A_nn - A_nm N.
CMatrix closed_loop_matrix(const CMatrix& N, const Blocks& blocks);

/// Default trial points: eight points on |z| = 1.5 plus z = 0.
std::vector<Complex> default_trial_points();

/// Max over trial points of the relative gap between det(A - zI) and
/// det(A_nn - A_nm N - zI) det(A_mm + N A_nm - zI).
double verify_charpoly_factorization(const CMatrix& N, const Blocks& blocks,
                                     const std::vector<Complex>& trial_points =
                                         default_trial_points());

/// Greedy multiset distance: max over expected values of the distance to the
/// nearest unused actual value. Sizes must match.
double multiset_distance(std::vector<Complex> expected, std::vector<Complex> actual);

/// Largest distance between the eigenvalues of A and the union of the
/// eigenvalues of A_nn - A_nm N and A_mm + N A_nm.
double spectrum_split_error(const CMatrix& N, const Blocks& blocks);

/// Cross-check through left chains: with Q = P^{-1}, the rows dual to the
/// non-selected columns give N = Q_mm^{-1} Q_mn. Returns the relative
/// disagreement, or nullopt when Q_mm fails the rank test. Throws
/// NumericalError when the full chain basis is not invertible.
std::optional<double> left_crosscheck(const Spectrum& spectrum,
                                      const Selection& selection,
                                      const Equilibrium& equilibrium,
                                      const Tolerances& tol);

struct DedupeResult {
  std::vector<Equilibrium> kept;
  /// (dropped equilibrium, index into kept that it duplicates)
  std::vector<std::pair<Equilibrium, std::size_t>> dropped;
};

DedupeResult dedupe_equilibria(std::vector<Equilibrium> equilibria,
                               const Tolerances& tol);

}  // namespace bkeq
