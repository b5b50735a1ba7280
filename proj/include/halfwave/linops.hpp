#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "halfwave/field.hpp"
#include "halfwave/ground_state.hpp"

namespace halfwave {

enum class Side { plus, minus };

const char* side_name(Side s);

/// Raised when a right-hand side is not orthogonal to the operator's kernel.
class SolvabilityError : public PreconditionError {
 public:
  SolvabilityError(const std::string& what, double pairing)
      : PreconditionError(what), pairing_(pairing) {}
  /// Relative pairing |<rhs, v>| / ||rhs|| that failed.
  double pairing() const { return pairing_; }

 private:
  double pairing_;
};

/// L2-orthonormal kernel vectors: {d1 Q, d2 Q} for plus, {Q} for minus.
struct KernelBasis {
  Side side;
  std::vector<RealField> vectors;
};

KernelBasis kernel_basis(Side side, const GroundState& gs);

/// Df + f - c Q f with c = 2 (plus) or 1 (minus).
RealField apply_L(Side side, const RealField& f, const GroundState& gs);

/// Parity per axis, +1 even or -1 odd.
struct Parity {
  int p1 = 1;
  int p2 = 1;
};

/// Odd along `axis`, even along the other.
inline Parity odd_along(int axis) { return axis == 0 ? Parity{-1, 1} : Parity{1, -1}; }

struct SolveOptions {
  double tol = 1e-10;
  std::optional<Parity> sector;
  double solvability_tol = 1e-7;
  int max_iter = 3000;
  int max_refinements = 4;
};

struct SolveReport {
  int iterations = 0;
  int refinements = 0;
  double residual = 0.0;
  /// max_v |<rhs, v>| / ||rhs|| over kernel vectors.
  double pairing = 0.0;
  std::vector<double> history;
};

/// Solves L x = rhs on the kernel complement with kernel-projected MINRES,
/// preconditioned symmetrically by (D+1)^{-1/2}.
RealField solve_L(Side side, const RealField& rhs, const GroundState& gs,
                  const SolveOptions& opts = {}, SolveReport* report = nullptr);

/// Largest relative kernel pairing of f.
double kernel_pairing(const RealField& f, const KernelBasis& kb);

struct EigenOptions {
  int block = 4;
  int max_iter = 600;
  double residual_tol = 1e-4;
  unsigned seed = 7;
};

struct EigenReport {
  double value = 0.0;
  double residual = 0.0;
  int iterations = 0;
  RealField vector;
};

/// Smallest Rayleigh quotient <L f, f> / <f, f> over f orthogonal to the
/// constraints, by projected block LOBPCG with (D+1)^{-1} preconditioning.
EigenReport min_rayleigh_quotient(Side side, const GroundState& gs,
                                  const std::vector<RealField>& constraints,
                                  const EigenOptions& opts = {});

/// (min over constraints_plus complement of L+, min over constraints_minus complement of L-)
std::pair<double, double> coercivity_estimate(const GroundState& gs,
                                              const std::vector<RealField>& constraints_plus,
                                              const std::vector<RealField>& constraints_minus,
                                              const EigenOptions& opts = {});

}  // namespace halfwave
