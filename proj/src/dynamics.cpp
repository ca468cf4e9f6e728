#include "bkeq/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bkeq {

Trajectory simulate(const Equilibrium& equilibrium, const Blocks& blocks,
                    const Vector& k0, int steps) {
  if (!equilibrium.real) {
    throw std::invalid_argument("simulation requires a real equilibrium");
  }
  if (steps < 0) throw std::invalid_argument("steps must be non-negative");
  if (k0.size() != blocks.n()) {
    throw std::invalid_argument("k0 must have " + std::to_string(blocks.n()) + " entries");
  }
  if (!k0.allFinite()) throw std::invalid_argument("k0 must be finite");

  const Matrix N = equilibrium.N_real();
  const Matrix closed = blocks.nn - blocks.nm * N;

  Trajectory path;
  path.k_path.reserve(static_cast<std::size_t>(steps) + 1);
  path.q_path.reserve(static_cast<std::size_t>(steps) + 1);
  Vector k = k0;
  for (int t = 0; t <= steps; ++t) {
    path.q_path.push_back(-N * k);
    path.k_path.push_back(k);
    if (t < steps) k = closed * k;
  }
  for (Complex z : equilibrium.closed_loop_eigenvalues) {
    path.rho_hat = std::max(path.rho_hat, std::abs(z));
  }
  path.basis_condition = equilibrium.pnn_condition;
  for (const Pick& p : equilibrium.selection.picks) {
    path.max_block = std::max(path.max_block, static_cast<int>(p.prefix));
  }
  return path;
}

BoundednessResult boundedness_check(const Trajectory& trajectory, double unit_margin) {
  BoundednessResult result;
  result.bound = 10.0 * trajectory.basis_condition;
  if (trajectory.k_path.empty()) return result;
  const double k0_norm = trajectory.k_path.front().norm();
  if (k0_norm == 0.0) return result;

  const double rate = trajectory.rho_hat + unit_margin;
  for (std::size_t t = 0; t < trajectory.k_path.size(); ++t) {
    const double norm = trajectory.k_path[t].norm();
    // rounding floor: states this small are numerically zero
    if (norm <= 1e-14 * k0_norm) continue;
    const double envelope = std::pow(1.0 + static_cast<double>(t), trajectory.max_block - 1) *
                            std::pow(rate, static_cast<double>(t)) * k0_norm;
    const double ratio = envelope > 0.0 ? norm / envelope
                                        : std::numeric_limits<double>::infinity();
    result.max_ratio = std::max(result.max_ratio, ratio);
  }
  result.bounded = result.max_ratio <= result.bound;
  return result;
}

}  // namespace bkeq
