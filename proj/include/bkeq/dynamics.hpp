#pragma once

#include <vector>

#include "bkeq/equilibria.hpp"

namespace bkeq {

/// Perfect-foresight path k_{t+1} = (A_nn - A_nm N) k_t, q_t = -N k_t.
struct Trajectory {
  std::vector<Vector> k_path;
  std::vector<Vector> q_path;
  /// Largest closed-loop eigenvalue modulus.
  double rho_hat = 0.0;
  /// Condition number of the closed-loop chain basis (P_nn).
  double basis_condition = 1.0;
  /// Longest chain prefix in the selection; > 1 means a Jordan block.
  int max_block = 1;
};

struct BoundednessResult {
  bool bounded = true;
  /// max_t ||k_t|| / ((1+t)^(b-1) (rho_hat+margin)^t ||k_0||)
  double max_ratio = 0.0;
  /// The allowed constant, 10 * basis_condition.
  double bound = 0.0;
};

/// Requires a real equilibrium (throws std::invalid_argument otherwise).
Trajectory simulate(const Equilibrium& equilibrium, const Blocks& blocks,
                    const Vector& k0, int steps);

BoundednessResult boundedness_check(const Trajectory& trajectory,
                                    double unit_margin);

}  // namespace bkeq
