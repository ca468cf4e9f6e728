#include "bkeq/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bkeq/error.hpp"
#include "linalg.hpp"

namespace bkeq {

namespace {

using detail::Mat;

std::string format_value(Complex z) {
  std::ostringstream os;
  os.precision(12);
  os << z.real();
  if (z.imag() != 0.0) os << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

// Single-linkage clustering of eigenvalues closer than radius.
std::vector<std::vector<Complex>> cluster_values(const std::vector<Complex>& values,
                                                 double radius) {
  const std::size_t count = values.size();
  std::vector<std::size_t> parent(count);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto root = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      if (std::abs(values[i] - values[j]) <= radius) parent[root(i)] = root(j);
    }
  }
  std::vector<std::vector<Complex>> groups;
  std::vector<std::ptrdiff_t> slot(count, -1);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t r = root(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::ptrdiff_t>(groups.size());
      groups.emplace_back();
    }
    groups[slot[r]].push_back(values[i]);
  }
  return groups;
}

bool orders_before(Complex a, Complex b) {
  const double ma = std::abs(a), mb = std::abs(b);
  if (ma != mb) return ma < mb;
  return std::arg(a) < std::arg(b);
}

// Scales the whole chain so its eigenvector has unit norm and its first
// significant entry is real positive.
void normalize_chain(std::vector<CVector>& chain) {
  const CVector& head = chain.front();
  const double norm = head.norm();
  const double cutoff = 1e-10 * head.cwiseAbs().maxCoeff();
  Complex phase(1.0, 0.0);
  for (Eigen::Index i = 0; i < head.size(); ++i) {
    if (std::abs(head(i)) > cutoff) {
      phase = head(i) / std::abs(head(i));
      break;
    }
  }
  const Complex factor = std::conj(phase) / norm;
  for (auto& v : chain) v *= factor;
}

struct KernelLevel {
  Eigen::MatrixXcd basis;
  int dim = 0;
};

[[noreturn]] void chain_failure(Complex lambda, const std::string& why) {
  throw NumericalError("Jordan chain construction failed for eigenvalue " +
                       format_value(lambda) + " (" + why +
                       "); try a looser cluster_tol");
}

// Builds the Jordan chains of one cluster from the null spaces of powers of
// (A - lambda I), extracting chain heads from the top level down.
template <typename Scalar>
std::vector<std::vector<CVector>> build_chains(const Matrix& A, Scalar lambda,
                                               int alg_mult, double a_norm,
                                               const Tolerances& tol) {
  const Eigen::Index dim = A.rows();
  const Mat<Scalar> B = A.template cast<Scalar>() -
                        lambda * Mat<Scalar>::Identity(dim, dim);
  const Complex lambda_c(lambda);

  std::vector<Mat<Scalar>> kernels{Mat<Scalar>(dim, 0)};
  Mat<Scalar> power = Mat<Scalar>::Identity(dim, dim);
  for (int j = 1; j <= alg_mult; ++j) {
    power = power * B;
    Eigen::JacobiSVD<Mat<Scalar>> svd(power, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double scale = std::max(detail::sigma_max(sv), std::pow(a_norm, j));
    const int rank = detail::rank_above(sv, tol.rank_tol * scale);
    const int nullity = static_cast<int>(dim) - rank;
    const int previous = static_cast<int>(kernels.back().cols());
    if (nullity > alg_mult) {
      chain_failure(lambda_c, "null space of dimension " + std::to_string(nullity) +
                                  " exceeds algebraic multiplicity " +
                                  std::to_string(alg_mult));
    }
    if (nullity <= previous) {
      chain_failure(lambda_c, "null space stopped growing at dimension " +
                                  std::to_string(previous) + " of " +
                                  std::to_string(alg_mult));
    }
    kernels.push_back(svd.matrixV().rightCols(nullity));
    if (nullity == alg_mult) break;
  }
  if (kernels.back().cols() != alg_mult) {
    chain_failure(lambda_c, "null spaces do not reach the algebraic multiplicity");
  }

  const int levels = static_cast<int>(kernels.size()) - 1;
  // growth[j] = number of chains of length >= j
  std::vector<int> growth(levels + 2, 0);
  for (int j = 1; j <= levels; ++j) {
    growth[j] = static_cast<int>(kernels[j].cols() - kernels[j - 1].cols());
  }

  std::vector<std::vector<Mat<Scalar>>> chains;  // each stored top-down
  std::vector<Mat<Scalar>> frontier;             // level-j vector of each chain
  for (int j = levels; j >= 1; --j) {
    for (auto& v : frontier) v = B * v;
    for (std::size_t c = 0; c < frontier.size(); ++c) chains[c].push_back(frontier[c]);

    const int fresh = growth[j] - growth[j + 1];
    if (fresh <= 0) continue;

    const Mat<Scalar>& level = kernels[j];
    Mat<Scalar> heads;
    if (kernels[j - 1].cols() == 0 && frontier.empty()) {
      heads = level.leftCols(fresh);
    } else {
      Mat<Scalar> spanned(dim, kernels[j - 1].cols() + static_cast<Eigen::Index>(frontier.size()));
      spanned.leftCols(kernels[j - 1].cols()) = kernels[j - 1];
      for (std::size_t c = 0; c < frontier.size(); ++c) {
        spanned.col(kernels[j - 1].cols() + static_cast<Eigen::Index>(c)) = frontier[c];
      }
      const double span_scale = std::max(1.0, detail::spectral_norm(spanned));
      const Mat<Scalar> basis = detail::orthonormal_range<Scalar>(
          spanned, tol.rank_tol * span_scale);
      const Mat<Scalar> projected = level - basis * (basis.adjoint() * level);
      Eigen::JacobiSVD<Mat<Scalar>> svd(projected, Eigen::ComputeFullU);
      const auto& sv = svd.singularValues();
      if (sv.size() < fresh || !(sv(fresh - 1) > std::sqrt(tol.rank_tol))) {
        chain_failure(lambda_c, "no complement for new chain heads at level " +
                                    std::to_string(j));
      }
      heads = svd.matrixU().leftCols(fresh);
    }
    for (int h = 0; h < fresh; ++h) {
      frontier.push_back(heads.col(h));
      chains.push_back({heads.col(h)});
    }
  }

  std::vector<std::vector<CVector>> out;
  out.reserve(chains.size());
  for (auto& top_down : chains) {
    std::vector<CVector> chain;
    for (auto it = top_down.rbegin(); it != top_down.rend(); ++it) {
      chain.push_back(it->template cast<Complex>());
    }
    normalize_chain(chain);
    out.push_back(std::move(chain));
  }
  return out;
}

void recount(Spectrum& spectrum) {
  spectrum.s = 0;
  spectrum.s1 = 0;
  spectrum.has_boundary = false;
  for (const auto& c : spectrum.clusters) {
    if (c.stability == Stability::Stable) {
      spectrum.s += c.alg_mult;
      spectrum.s1 += 1;
    } else if (c.stability == Stability::Boundary) {
      spectrum.has_boundary = true;
    }
  }
}

}  // namespace

const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Boundary: return "boundary";
  }
  return "?";
}

int Spectrum::dimension() const {
  int total = 0;
  for (const auto& c : clusters) total += c.alg_mult;
  return total;
}

Stability classify_modulus(double modulus, double unit_margin) {
  if (modulus < 1.0 - unit_margin) return Stability::Stable;
  if (modulus > 1.0 + unit_margin) return Stability::Unstable;
  return Stability::Boundary;
}

Spectrum eigendecompose(const ModelSpec& spec) {
  return eigendecompose(spec.A(), spec.tol());
}

Spectrum eigendecompose(const Matrix& A, const Tolerances& tol) {
  Eigen::EigenSolver<Matrix> solver(A, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigenvalue iteration did not converge for the " << A.rows() << "x"
       << A.cols() << " model matrix A";
    throw NumericalError(os.str());
  }
  const auto& eig = solver.eigenvalues();
  std::vector<Complex> values(eig.data(), eig.data() + eig.size());

  const double a_fro = A.norm();
  const double a_norm = detail::spectral_norm(A);
  const auto groups = cluster_values(values, tol.cluster_tol * a_fro);

  struct Pending {
    Complex value;
    int alg_mult;
    bool self_conjugate;
  };
  std::vector<Pending> pending;
  for (const auto& group : groups) {
    Complex mean(0.0, 0.0);
    for (Complex z : group) mean += z;
    mean /= static_cast<double>(group.size());
    // The eigenvalue set of a real matrix is conjugation-symmetric, so a
    // cluster either equals its own mirror or has a distinct mirror cluster.
    bool self_conjugate = true;
    for (Complex z : group) {
      if (z.imag() == 0.0) continue;
      bool found = false;
      for (Complex w : group) {
        if (w == std::conj(z)) {
          found = true;
          break;
        }
      }
      if (!found) {
        self_conjugate = false;
        break;
      }
    }
    if (self_conjugate) {
      pending.push_back({Complex(mean.real(), 0.0), static_cast<int>(group.size()), true});
    } else if (mean.imag() > 0.0) {
      pending.push_back({mean, static_cast<int>(group.size()), false});
    }
  }

  Spectrum spectrum;
  for (const auto& p : pending) {
    EigenCluster cluster;
    cluster.value = p.value;
    cluster.alg_mult = p.alg_mult;
    if (p.self_conjugate) {
      cluster.chains = build_chains<double>(A, p.value.real(), p.alg_mult, a_norm, tol);
    } else {
      cluster.chains = build_chains<Complex>(A, p.value, p.alg_mult, a_norm, tol);
    }
    cluster.geo_mult = static_cast<int>(cluster.chains.size());
    cluster.stability = classify_modulus(std::abs(p.value), tol.unit_margin);
    spectrum.clusters.push_back(cluster);

    if (!p.self_conjugate) {
      EigenCluster mirror = cluster;
      mirror.value = std::conj(cluster.value);
      for (auto& chain : mirror.chains) {
        for (auto& v : chain) v = v.conjugate();
      }
      spectrum.clusters.push_back(std::move(mirror));
    }
  }

  std::stable_sort(spectrum.clusters.begin(), spectrum.clusters.end(),
                   [](const EigenCluster& a, const EigenCluster& b) {
                     return orders_before(a.value, b.value);
                   });
  for (std::size_t i = 0; i < spectrum.clusters.size(); ++i) {
    auto& c = spectrum.clusters[i];
    if (c.is_real()) continue;
    for (std::size_t j = 0; j < spectrum.clusters.size(); ++j) {
      if (j != i && spectrum.clusters[j].value == std::conj(c.value)) {
        c.conjugate_partner = j;
        break;
      }
    }
  }
  recount(spectrum);
  return spectrum;
}

StabilitySplit stability_split(const Spectrum& spectrum) {
  StabilitySplit split;
  for (std::size_t i = 0; i < spectrum.clusters.size(); ++i) {
    switch (spectrum.clusters[i].stability) {
      case Stability::Stable: split.stable.push_back(i); break;
      case Stability::Unstable: split.unstable.push_back(i); break;
      case Stability::Boundary: split.boundary.push_back(i); break;
    }
  }
  return split;
}

Spectrum resolve_boundary(Spectrum spectrum, BoundaryPolicy policy) {
  if (policy == BoundaryPolicy::Refuse) return spectrum;
  const Stability relabel = policy == BoundaryPolicy::TreatStable
                                ? Stability::Stable
                                : Stability::Unstable;
  for (auto& c : spectrum.clusters) {
    if (c.stability == Stability::Boundary) c.stability = relabel;
  }
  recount(spectrum);
  return spectrum;
}

int geometric_multiplicity(const Matrix& A, Complex lambda, const Tolerances& tol) {
  const Eigen::Index dim = A.rows();
  const CMatrix B = A.cast<Complex>() - lambda * CMatrix::Identity(dim, dim);
  Eigen::JacobiSVD<CMatrix> svd(B);
  const auto& sv = svd.singularValues();
  const double scale = std::max(detail::sigma_max(sv), detail::spectral_norm(A));
  const int rank = detail::rank_above(sv, tol.rank_tol * scale);
  const int deficiency = static_cast<int>(dim) - rank;
  if (deficiency == 0) {
    throw InputError(format_value(lambda) + " is not an eigenvalue of A at rank_tol " +
                     std::to_string(tol.rank_tol));
  }
  return deficiency;
}

Eigen::Index JordanBasis::find(std::size_t cluster, std::size_t chain,
                               std::size_t position) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const auto& c = columns[i];
    if (c.cluster == cluster && c.chain == chain && c.position == position) {
      return static_cast<Eigen::Index>(i);
    }
  }
  return -1;
}

JordanBasis jordan_basis(const Spectrum& spectrum) {
  const Eigen::Index dim = spectrum.dimension();
  JordanBasis basis;
  basis.P = CMatrix::Zero(dim, dim);
  basis.J = CMatrix::Zero(dim, dim);
  Eigen::Index col = 0;
  for (std::size_t ci = 0; ci < spectrum.clusters.size(); ++ci) {
    const auto& cluster = spectrum.clusters[ci];
    for (std::size_t k = 0; k < cluster.chains.size(); ++k) {
      const auto& chain = cluster.chains[k];
      for (std::size_t p = 0; p < chain.size(); ++p, ++col) {
        basis.P.col(col) = chain[p];
        basis.J(col, col) = cluster.value;
        if (p > 0) basis.J(col - 1, col) = 1.0;
        basis.columns.push_back({ci, k, p});
      }
    }
  }
  return basis;
}

}  // namespace bkeq
