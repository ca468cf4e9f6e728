#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bkeq/equilibria.hpp"

namespace bkeq {

enum class Verdict { NoEquilibrium, Unique, FiniteMany, Uncountable };

const char* to_string(Verdict v);

/// Blanchard-Kahn verdict with its counts.
struct Classification {
  /// Withheld (nullopt) when boundary_blocked.
  std::optional<Verdict> verdict;
  int s = 0;
  int s1 = 0;
  int n = 0;
  int m = 0;
  std::uint64_t candidate_count = 0;
  std::size_t enumerated_count = 0;
  std::size_t accepted_count = 0;
  bool boundary_blocked = false;
  /// Fewer equilibria were realized than C(s1, n) (FiniteMany) or none at
  /// all (Unique), typically because P_nn was singular.
  bool realized_below_bound = false;
};

/// C(s1, n) in exact integer arithmetic; 0 when n > s1.
std::uint64_t candidate_count(int s1, int n);

/// Verdict from the (boundary-resolved) spectrum and enumeration counts.
Classification blanchard_kahn_case(const Spectrum& spectrum, int n, int m,
                                   std::size_t enumerated_count,
                                   std::size_t accepted_count);

struct AlphaMember {
  Complex alpha;
  std::variant<Equilibrium, Rejection> outcome;
};

/// One-parameter family through a stable eigenspace of dimension >= 2:
/// a selected eigenvector is replaced by P1 + alpha P2.
struct AlphaFamily {
  std::size_t cluster = 0;
  CVector base_first;
  CVector base_second;
  std::vector<Complex> alphas;
  std::vector<AlphaMember> members;
};

/// Real grid -2, -1.5, ..., 2 followed by i and -i.
std::vector<Complex> default_alpha_grid();

/// The first stable cluster with geo_mult >= 2, if any.
std::optional<std::size_t> first_multi_eigenspace(const Spectrum& spectrum);

/// Samples the family through the given cluster. Throws std::invalid_argument
/// when the cluster has fewer than two eigenvectors or n < 1.
AlphaFamily sample_alpha_family(const Spectrum& spectrum, std::size_t cluster,
                                const Blocks& blocks, const Tolerances& tol,
                                const std::vector<Complex>& alphas =
                                    default_alpha_grid());

}  // namespace bkeq
