#include "bkeq/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bkeq/error.hpp"
#include "linalg.hpp"

namespace bkeq {

namespace {

struct Slot {
  std::size_t cluster;
  std::size_t chain;
  std::size_t length;
};

void enumerate_slots(const std::vector<Slot>& slots, std::size_t index, int remaining,
                     std::vector<Pick>& current, std::vector<std::vector<Pick>>& out) {
  if (remaining == 0) {
    out.push_back(current);
    return;
  }
  if (index == slots.size()) return;
  const Slot& slot = slots[index];
  const int longest = std::min<int>(static_cast<int>(slot.length), remaining);
  for (int p = longest; p >= 0; --p) {
    if (p > 0) current.push_back({slot.cluster, slot.chain, static_cast<std::size_t>(p)});
    enumerate_slots(slots, index + 1, remaining - p, current, out);
    if (p > 0) current.pop_back();
  }
}

bool is_conjugate_closed(const Spectrum& spectrum, const std::vector<Pick>& picks) {
  for (const Pick& pick : picks) {
    const auto& cluster = spectrum.clusters[pick.cluster];
    if (cluster.is_real()) continue;
    if (!cluster.conjugate_partner) return false;
    const Pick mirror{*cluster.conjugate_partner, pick.chain, pick.prefix};
    if (std::find(picks.begin(), picks.end(), mirror) == picks.end()) return false;
  }
  return true;
}

// Greedy matching with a per-group tolerance: a value of multiplicity k in
// the expected set may scatter by O(tol^(1/k)) in the computed set, while the
// group mean stays within O(tol).
bool eigenvalues_match(const std::vector<Complex>& expected,
                       const std::vector<Complex>& actual, double radius,
                       std::string& detail) {
  if (expected.size() != actual.size()) {
    detail = "closed-loop eigenvalue count differs from selection";
    return false;
  }
  std::vector<Complex> distinct;
  std::vector<int> counts;
  for (Complex z : expected) {
    auto it = std::find(distinct.begin(), distinct.end(), z);
    if (it == distinct.end()) {
      distinct.push_back(z);
      counts.push_back(1);
    } else {
      ++counts[it - distinct.begin()];
    }
  }
  std::vector<bool> used(actual.size(), false);
  for (std::size_t g = 0; g < distinct.size(); ++g) {
    const int k = counts[g];
    const double spread = std::pow(radius, 1.0 / k);
    Complex mean(0.0, 0.0);
    for (int r = 0; r < k; ++r) {
      std::ptrdiff_t best = -1;
      double best_dist = 0.0;
      for (std::size_t i = 0; i < actual.size(); ++i) {
        if (used[i]) continue;
        const double d = std::abs(actual[i] - distinct[g]);
        if (best < 0 || d < best_dist) {
          best = static_cast<std::ptrdiff_t>(i);
          best_dist = d;
        }
      }
      if (best_dist > spread) {
        std::ostringstream os;
        os << "closed-loop eigenvalue " << actual[best] << " is " << best_dist
           << " away from selected " << distinct[g];
        detail = os.str();
        return false;
      }
      used[best] = true;
      mean += actual[best];
    }
    mean /= static_cast<double>(k);
    if (std::abs(mean - distinct[g]) > radius) {
      std::ostringstream os;
      os << "closed-loop eigenvalues around " << distinct[g] << " average to " << mean;
      detail = os.str();
      return false;
    }
  }
  return true;
}

std::vector<Complex> eigenvalues_of(const CMatrix& M) {
  if (M.rows() == 0) return {};
  Eigen::ComplexEigenSolver<CMatrix> solver(M, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigenvalue iteration did not converge for a closed-loop block");
  }
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

// Extended precision for the determinant check: with large ||N|| the block
// products lose digits in double.
using XComplex = std::complex<long double>;
using XMatrix = Eigen::Matrix<XComplex, Eigen::Dynamic, Eigen::Dynamic>;

XComplex determinant(const XMatrix& M) {
  if (M.rows() == 0) return {1.0L, 0.0L};
  return M.partialPivLu().determinant();
}

XMatrix widen(const CMatrix& M) { return M.cast<XComplex>(); }
XMatrix widen(const Matrix& M) { return M.cast<XComplex>(); }

}  // namespace

const char* to_string(RejectionReason r) {
  switch (r) {
    case RejectionReason::SingularPnn: return "singular_pnn";
    case RejectionReason::ComplexInRealMode: return "complex_in_real_mode";
    case RejectionReason::ResidualFailure: return "residual_failure";
    case RejectionReason::SpectrumMismatch: return "spectrum_mismatch";
    case RejectionReason::Duplicate: return "duplicate";
  }
  return "?";
}

Selection make_selection(const Spectrum& spectrum, std::vector<Pick> picks) {
  std::sort(picks.begin(), picks.end());
  Selection sel;
  const int dim = spectrum.dimension();
  int width = 0;
  for (const Pick& p : picks) width += static_cast<int>(p.prefix);
  sel.columns = CMatrix(dim, width);
  Eigen::Index col = 0;
  for (const Pick& p : picks) {
    const auto& cluster = spectrum.clusters.at(p.cluster);
    const auto& chain = cluster.chains.at(p.chain);
    if (p.prefix < 1 || p.prefix > chain.size()) {
      throw std::out_of_range("pick prefix outside its chain");
    }
    for (std::size_t j = 0; j < p.prefix; ++j, ++col) {
      sel.columns.col(col) = chain[j];
      sel.eigenvalues.push_back(cluster.value);
    }
  }
  sel.conjugate_closed = is_conjugate_closed(spectrum, picks);
  sel.picks = std::move(picks);
  return sel;
}

std::vector<Selection> enumerate_selections(const Spectrum& spectrum, int n,
                                            SelectionMode mode) {
  if (n < 0 || spectrum.s < n) return {};
  std::vector<Slot> slots;
  for (std::size_t ci = 0; ci < spectrum.clusters.size(); ++ci) {
    const auto& cluster = spectrum.clusters[ci];
    if (cluster.stability != Stability::Stable) continue;
    for (std::size_t k = 0; k < cluster.chains.size(); ++k) {
      slots.push_back({ci, k, cluster.chains[k].size()});
    }
  }
  std::vector<std::vector<Pick>> lists;
  std::vector<Pick> current;
  enumerate_slots(slots, 0, n, current, lists);
  std::sort(lists.begin(), lists.end());

  std::vector<Selection> out;
  for (auto& picks : lists) {
    Selection sel = make_selection(spectrum, std::move(picks));
    if (mode == SelectionMode::RealOnly && !sel.conjugate_closed) continue;
    out.push_back(std::move(sel));
  }
  return out;
}

CMatrix riccati_map(const CMatrix& N, const Blocks& blocks) {
  const CMatrix nn = blocks.nn.cast<Complex>();
  const CMatrix nm = blocks.nm.cast<Complex>();
  const CMatrix mn = blocks.mn.cast<Complex>();
  const CMatrix mm = blocks.mm.cast<Complex>();
  return mn + N * nn - mm * N - N * nm * N;
}

double riccati_residual(const CMatrix& N, const Blocks& blocks) {
  if (N.rows() != blocks.m() || N.cols() != blocks.n()) {
    throw InputError("N must be " + std::to_string(blocks.m()) + "x" +
                     std::to_string(blocks.n()));
  }
  const double a_norm = blocks.assemble().norm();
  const double n_norm = N.norm();
  return riccati_map(N, blocks).norm() / ((1.0 + a_norm) * std::pow(1.0 + n_norm, 2));
}

double riccati_residual(const Matrix& N, const Blocks& blocks) {
  return riccati_residual(CMatrix(N.cast<Complex>()), blocks);
}

TransformPair transform_pair(const CMatrix& N) {
  const Eigen::Index m = N.rows();
  const Eigen::Index n = N.cols();
  TransformPair pair;
  pair.T = CMatrix::Identity(n + m, n + m);
  pair.T_inv = CMatrix::Identity(n + m, n + m);
  pair.T.bottomLeftCorner(m, n) = -N;
  pair.T_inv.bottomLeftCorner(m, n) = N;
  return pair;
}

CMatrix closed_loop_matrix(const CMatrix& N, const Blocks& blocks) {
  return blocks.nn.cast<Complex>() - blocks.nm.cast<Complex>() * N;
}

std::vector<Complex> default_trial_points() {
  std::vector<Complex> points;
  for (int k = 0; k < 8; ++k) {
    points.push_back(std::polar(1.5, 2.0 * std::numbers::pi * k / 8.0));
  }
  points.emplace_back(0.0, 0.0);
  return points;
}

double verify_charpoly_factorization(const CMatrix& N, const Blocks& blocks,
                                     const std::vector<Complex>& trial_points) {
  const XMatrix A = widen(blocks.assemble());
  const XMatrix NN = widen(N);
  const XMatrix upper = widen(blocks.nn) - widen(blocks.nm) * NN;
  const XMatrix lower = widen(blocks.mm) + NN * widen(blocks.nm);
  const auto shifted = [](const XMatrix& M, XComplex z) {
    return XMatrix(M - z * XMatrix::Identity(M.rows(), M.cols()));
  };
  double worst = 0.0;
  for (Complex point : trial_points) {
    const XComplex z(point.real(), point.imag());
    const XComplex full = determinant(shifted(A, z));
    const XComplex split = determinant(shifted(upper, z)) * determinant(shifted(lower, z));
    const long double err = std::abs(full - split) / std::max(std::abs(full), 1e-12L);
    worst = std::max(worst, static_cast<double>(err));
  }
  return worst;
}

double multiset_distance(std::vector<Complex> expected, std::vector<Complex> actual) {
  if (expected.size() != actual.size()) {
    throw std::invalid_argument("multiset_distance: size mismatch");
  }
  double worst = 0.0;
  std::vector<bool> used(actual.size(), false);
  for (Complex z : expected) {
    std::ptrdiff_t best = -1;
    double best_dist = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
      if (used[i]) continue;
      const double d = std::abs(actual[i] - z);
      if (best < 0 || d < best_dist) {
        best = static_cast<std::ptrdiff_t>(i);
        best_dist = d;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_dist);
  }
  return worst;
}

double spectrum_split_error(const CMatrix& N, const Blocks& blocks) {
  const CMatrix A = blocks.assemble().cast<Complex>();
  auto full = eigenvalues_of(A);
  auto upper = eigenvalues_of(closed_loop_matrix(N, blocks));
  const auto lower =
      eigenvalues_of(blocks.mm.cast<Complex>() + N * blocks.nm.cast<Complex>());
  upper.insert(upper.end(), lower.begin(), lower.end());
  return multiset_distance(std::move(full), std::move(upper));
}

BuildResult build_equilibrium(const Selection& selection, const Blocks& blocks,
                              const Tolerances& tol, SelectionMode mode) {
  const Eigen::Index n = blocks.n();
  const Eigen::Index m = blocks.m();
  if (selection.columns.cols() != n || selection.columns.rows() != n + m) {
    throw std::invalid_argument("selection does not hold n columns of length n+m");
  }
  const CMatrix P_nn = selection.columns.topRows(n);
  const CMatrix P_mn = selection.columns.bottomRows(m);

  const double inv_cond = detail::inverse_condition(P_nn);
  const double condition = inv_cond > 0.0 ? 1.0 / inv_cond
                                          : std::numeric_limits<double>::infinity();
  if (inv_cond < tol.rank_tol) {
    std::ostringstream os;
    os << "P_nn is numerically singular (condition " << condition << ")";
    return Rejection{RejectionReason::SingularPnn, selection, condition, os.str()};
  }

  CMatrix N(m, n);
  if (n > 0) {
    // N P_nn = -P_mn
    Eigen::FullPivLU<CMatrix> lu(P_nn.transpose());
    N = -lu.solve(P_mn.transpose()).transpose();
    if (!N.allFinite()) throw NumericalError("solve for N produced non-finite values");
    // fold -0.0 into +0.0 so reports are sign-stable
    N = N.unaryExpr([](Complex z) { return Complex(z.real() + 0.0, z.imag() + 0.0); });
  }

  bool real = false;
  if (mode == SelectionMode::RealOnly) {
    const double imag = N.imag().norm();
    if (imag > tol.residual_tol * (1.0 + N.norm())) {
      std::ostringstream os;
      os << "N has imaginary part of norm " << imag << " in real mode";
      return Rejection{RejectionReason::ComplexInRealMode, selection, condition, os.str()};
    }
    N = N.real().cast<Complex>();
    real = true;
  } else {
    real = N.imag().norm() == 0.0;
  }

  Equilibrium eq;
  eq.N = std::move(N);
  eq.real = real;
  eq.selection = selection;
  eq.closed_loop_eigenvalues = selection.eigenvalues;
  eq.pnn_condition = condition;
  eq.residual_norm = riccati_residual(eq.N, blocks);

  if (!(eq.residual_norm <= tol.residual_tol)) {
    std::ostringstream os;
    os << "Riccati residual " << eq.residual_norm << " exceeds " << tol.residual_tol;
    return Rejection{RejectionReason::ResidualFailure, selection, condition, os.str()};
  }

  const double radius = tol.cluster_tol * std::max(1.0, blocks.assemble().norm());
  std::string detail;
  if (!eigenvalues_match(selection.eigenvalues,
                         eigenvalues_of(closed_loop_matrix(eq.N, blocks)), radius,
                         detail)) {
    return Rejection{RejectionReason::SpectrumMismatch, selection, condition, detail};
  }
  return eq;
}

std::optional<double> left_crosscheck(const Spectrum& spectrum,
                                      const Selection& selection,
                                      const Equilibrium& equilibrium,
                                      const Tolerances& tol) {
  const JordanBasis basis = jordan_basis(spectrum);
  const Eigen::Index dim = basis.P.rows();
  const Eigen::Index n = equilibrium.N.cols();
  const Eigen::Index m = equilibrium.N.rows();

  if (detail::inverse_condition(basis.P) < tol.rank_tol) {
    throw NumericalError(
        "full chain basis P is not invertible; left-eigenvector check impossible");
  }
  const CMatrix Q = basis.P.partialPivLu().inverse();

  std::vector<bool> chosen(dim, false);
  for (const Pick& pick : selection.picks) {
    for (std::size_t j = 0; j < pick.prefix; ++j) {
      const Eigen::Index idx = basis.find(pick.cluster, pick.chain, j);
      if (idx < 0) throw std::logic_error("selection refers to a missing column");
      chosen[idx] = true;
    }
  }
  CMatrix dual(m, dim);
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (!chosen[i]) dual.row(row++) = Q.row(i);
  }
  if (row != m) throw std::logic_error("selection does not leave m dual rows");

  const CMatrix Q_mn = dual.leftCols(n);
  const CMatrix Q_mm = dual.rightCols(m);
  if (detail::inverse_condition(Q_mm) < tol.rank_tol) return std::nullopt;
  const CMatrix N_left = Q_mm.partialPivLu().solve(Q_mn);
  return (N_left - equilibrium.N).norm() / (1.0 + equilibrium.N.norm());
}

DedupeResult dedupe_equilibria(std::vector<Equilibrium> equilibria,
                               const Tolerances& tol) {
  DedupeResult result;
  for (auto& eq : equilibria) {
    std::optional<std::size_t> twin;
    for (std::size_t k = 0; k < result.kept.size(); ++k) {
      const CMatrix& other = result.kept[k].N;
      if ((other - eq.N).norm() <= tol.residual_tol * (1.0 + other.norm())) {
        twin = k;
        break;
      }
    }
    if (twin) {
      result.dropped.emplace_back(std::move(eq), *twin);
    } else {
      result.kept.push_back(std::move(eq));
    }
  }
  return result;
}

}  // namespace bkeq
