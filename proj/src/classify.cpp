#include "bkeq/classify.hpp"

#include <stdexcept>

namespace bkeq {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::NoEquilibrium: return "no_equilibrium";
    case Verdict::Unique: return "unique";
    case Verdict::FiniteMany: return "finite_many";
    case Verdict::Uncountable: return "uncountable";
  }
  return "?";
}

std::uint64_t candidate_count(int s1, int n) {
  if (n < 0 || s1 < 0 || n > s1) return 0;
  const int k = std::min(n, s1 - n);
  std::uint64_t c = 1;
  for (int i = 0; i < k; ++i) {
    // c * (s1 - i) is divisible by (i + 1) at every step
    c = c * static_cast<std::uint64_t>(s1 - i) / static_cast<std::uint64_t>(i + 1);
  }
  return c;
}

Classification blanchard_kahn_case(const Spectrum& spectrum, int n, int m,
                                   std::size_t enumerated_count,
                                   std::size_t accepted_count) {
  Classification c;
  c.s = spectrum.s;
  c.s1 = spectrum.s1;
  c.n = n;
  c.m = m;
  c.candidate_count = candidate_count(spectrum.s1, n);
  c.enumerated_count = enumerated_count;
  c.accepted_count = accepted_count;
  if (spectrum.has_boundary) {
    c.boundary_blocked = true;
    return c;
  }
  if (c.s < n) {
    c.verdict = Verdict::NoEquilibrium;
  } else if (c.s == n || n == 0) {
    c.verdict = Verdict::Unique;
    c.realized_below_bound = accepted_count == 0;
  } else {
    bool multi = false;
    for (const auto& cluster : spectrum.clusters) {
      if (cluster.stability == Stability::Stable && cluster.geo_mult >= 2) multi = true;
    }
    c.verdict = multi ? Verdict::Uncountable : Verdict::FiniteMany;
    c.realized_below_bound = !multi && accepted_count < c.candidate_count;
  }
  return c;
}

std::vector<Complex> default_alpha_grid() {
  std::vector<Complex> grid;
  for (int k = -4; k <= 4; ++k) grid.emplace_back(0.5 * k, 0.0);
  grid.emplace_back(0.0, 1.0);
  grid.emplace_back(0.0, -1.0);
  return grid;
}

std::optional<std::size_t> first_multi_eigenspace(const Spectrum& spectrum) {
  for (std::size_t i = 0; i < spectrum.clusters.size(); ++i) {
    const auto& c = spectrum.clusters[i];
    if (c.stability == Stability::Stable && c.geo_mult >= 2) return i;
  }
  return std::nullopt;
}

AlphaFamily sample_alpha_family(const Spectrum& spectrum, std::size_t cluster,
                                const Blocks& blocks, const Tolerances& tol,
                                const std::vector<Complex>& alphas) {
  const auto& target = spectrum.clusters.at(cluster);
  if (target.geo_mult < 2) {
    throw std::invalid_argument("alpha family needs an eigenvalue with two eigenvectors");
  }
  const int n = blocks.n();
  if (n < 1) throw std::invalid_argument("alpha family needs n >= 1");

  // Base selection: the first one that uses eigenvector 0 of the cluster and
  // leaves eigenvector 1 free, so that P1 + alpha P2 stays independent of the
  // remaining columns for generic alpha.
  std::optional<Selection> base;
  for (auto& sel : enumerate_selections(spectrum, n, SelectionMode::AllowComplex)) {
    bool uses_first = false;
    bool uses_second = false;
    for (const Pick& p : sel.picks) {
      if (p.cluster != cluster) continue;
      if (p.chain == 0) uses_first = true;
      if (p.chain == 1) uses_second = true;
    }
    if (uses_first && !uses_second) {
      base = std::move(sel);
      break;
    }
  }
  if (!base) throw std::invalid_argument("no selection admits an alpha family");

  Eigen::Index column = 0;
  for (const Pick& p : base->picks) {
    if (p.cluster == cluster && p.chain == 0) break;
    column += static_cast<Eigen::Index>(p.prefix);
  }

  AlphaFamily family;
  family.cluster = cluster;
  family.base_first = target.chains[0][0];
  family.base_second = target.chains[1][0];
  family.alphas = alphas;
  for (Complex alpha : alphas) {
    Selection sel = *base;
    sel.columns.col(column) = family.base_first + alpha * family.base_second;
    sel.conjugate_closed = target.is_real() && alpha.imag() == 0.0 && base->conjugate_closed;
    family.members.push_back(
        {alpha, build_equilibrium(sel, blocks, tol, SelectionMode::AllowComplex)});
  }
  return family;
}

}  // namespace bkeq
