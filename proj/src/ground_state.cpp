#include "halfwave/ground_state.hpp"

#include <cmath>
#include <sstream>

#include "halfwave/spectral.hpp"

namespace halfwave {

RealField default_seed(const Grid2D& g) {
  return RealField::from_function(
      g, [](double x1, double x2) { return 3.0 * std::exp(-(x1 * x1 + x2 * x2) / 4.0); });
}

RealField ground_state_residual(const RealField& Q) {
  RealField r = dfrac(Q, 1.0);
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double q = Q.values[k];
    r.values[k] += q - q * q;
  }
  return r;
}

GroundState solve_ground_state(const Grid2D& g, double tol, int max_iter,
                               std::optional<RealField> seed) {
  if (!(tol > 1e-13 && tol < 1e-4)) {
    throw PreconditionError("solve_ground_state: tol must lie in (1e-13, 1e-4)");
  }
  if (max_iter < 1) throw PreconditionError("solve_ground_state: max_iter must be positive");
  RealField Q = seed ? *seed : default_seed(g);
  require_same_grid(Q.grid, g, "solve_ground_state");
  if (edge_ratio(Q) > 1e-3) {
    throw PreconditionError("solve_ground_state: seed does not fit in the box");
  }

  GroundState gs{Q, RealField(g), 0.0, 0.0, 0, 0.0, {}};
  const double q0 = l2_norm(Q);
  RealField res = ground_state_residual(Q);
  for (int it = 1; it <= max_iter; ++it) {
    // <(D+1)Q, Q> = <L_- Q, Q> + <Q^2, Q>
    RealField sq = hadamard(Q, Q);
    const double den = dot(sq, Q);
    const double num = dot(res, Q) + den;
    if (!(std::abs(den) > 0.0) || !std::isfinite(num / den)) {
      throw ConvergenceError("solve_ground_state: iterate collapsed to zero", gs.history);
    }
    const double m = num / den;
    Q = symmetrize_d4(m * m * shifted_dfrac(sq, -1.0));
    const double qn = l2_norm(Q);
    if (qn < 1e-8 * q0 || !Q.all_finite()) {
      throw ConvergenceError("solve_ground_state: iterate collapsed to zero", gs.history);
    }
    res = ground_state_residual(Q);
    const double rel = l2_norm(res) / qn;
    gs.history.push_back(rel);
    gs.multiplier = m;
    if (rel <= tol) {
      gs.Q = std::move(Q);
      gs.residual_field = std::move(res);
      gs.residual = rel;
      gs.mass_sq = dot(gs.Q, gs.Q);
      gs.iterations = it;
      return gs;
    }
  }
  std::ostringstream os;
  os << "solve_ground_state: no convergence in " << max_iter << " iterations, residual "
     << gs.history.back();
  throw ConvergenceError(os.str(), gs.history);
}

}  // namespace halfwave
