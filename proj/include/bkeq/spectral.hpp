#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bkeq/model.hpp"

namespace bkeq {

enum class Stability { Stable, Unstable, Boundary };

const char* to_string(Stability s);

/// One eigenvalue of A (after clustering) with its Jordan structure.
///
/// Each chain v_0, ..., v_{l-1} satisfies (A - value I) v_0 = 0 and
/// (A - value I) v_j = v_{j-1}. Chains are ordered longest first; v_0 has unit
/// Euclidean norm and its first significant entry is real and positive.
struct EigenCluster {
  Complex value;
  int alg_mult = 0;
  int geo_mult = 0;
  std::vector<std::vector<CVector>> chains;
  std::optional<std::size_t> conjugate_partner;
  Stability stability = Stability::Stable;

  bool is_real() const { return value.imag() == 0.0; }
};

/// Clusters are sorted by ascending |value|, ties by ascending argument.
struct Spectrum {
  std::vector<EigenCluster> clusters;
  /// Stable eigenvalues counted with algebraic multiplicity.
  int s = 0;
  /// Distinct stable clusters.
  int s1 = 0;
  bool has_boundary = false;

  int dimension() const;
};

struct StabilitySplit {
  std::vector<std::size_t> stable;
  std::vector<std::size_t> unstable;
  std::vector<std::size_t> boundary;
};

/// How Boundary clusters are treated once a verdict is requested.
enum class BoundaryPolicy { Refuse, TreatStable, TreatUnstable };

Stability classify_modulus(double modulus, double unit_margin);

Spectrum eigendecompose(const ModelSpec& spec);
Spectrum eigendecompose(const Matrix& A, const Tolerances& tol);

StabilitySplit stability_split(const Spectrum& spectrum);

/// Relabels Boundary clusters per the policy and recomputes s, s1 and
/// has_boundary. Refuse leaves the spectrum untouched.
Spectrum resolve_boundary(Spectrum spectrum, BoundaryPolicy policy);

/// dim - numerical rank of (A - lambda I). Throws InputError when lambda is
/// not an eigenvalue at the given rank tolerance.
int geometric_multiplicity(const Matrix& A, Complex lambda,
                           const Tolerances& tol);

/// Position of a column of the full chain basis.
struct ColumnRef {
  std::size_t cluster;
  std::size_t chain;
  std::size_t position;
};

/// A P = P J with P stacking every chain of every cluster, in cluster order.
struct JordanBasis {
  CMatrix P;
  CMatrix J;
  std::vector<ColumnRef> columns;

  /// Index of the given column in P, or -1.
  Eigen::Index find(std::size_t cluster, std::size_t chain,
                    std::size_t position) const;
};

JordanBasis jordan_basis(const Spectrum& spectrum);

}  // namespace bkeq
