#pragma once

#include <optional>
#include <vector>

#include "halfwave/field.hpp"

namespace halfwave {

/// Positive radial solution of DQ + Q = Q^2.
struct GroundState {
  RealField Q;
  /// DQ + Q - Q^2 at exit.
  RealField residual_field;
  /// ||DQ + Q - Q^2||_2 / ||Q||_2
  double residual = 0.0;
  double mass_sq = 0.0;
  int iterations = 0;
  /// Petviashvili multiplier of the last step.
  double multiplier = 0.0;
  std::vector<double> history;

  const Grid2D& grid() const { return Q.grid; }
};

/// Default seed 3 exp(-r^2/4).
RealField default_seed(const Grid2D& g);

/// Petviashvili iteration Q <- m^2 (D+1)^{-1} Q^2 with
/// m = <(D+1)Q, Q> / <Q^2, Q>, symmetrized over the square's 8 symmetries.
/// Stops when the relative PDE residual drops below tol.
GroundState solve_ground_state(const Grid2D& g, double tol = 1e-10, int max_iter = 2000,
                               std::optional<RealField> seed = std::nullopt);

/// DQ + Q - Q^2.
RealField ground_state_residual(const RealField& Q);

}  // namespace halfwave
