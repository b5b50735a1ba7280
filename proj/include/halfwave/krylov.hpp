#pragma once

#include <functional>
#include <vector>

namespace halfwave {

using Vec = std::vector<double>;
/// out = A(in); out is presized by the caller.
using LinearMap = std::function<void(const Vec& in, Vec& out)>;
/// In-place map, used for projections.
using InPlaceMap = std::function<void(Vec& v)>;

struct KrylovResult {
  Vec x;
  int iterations = 0;
  /// Final residual estimate ||b - A x|| / ||b||.
  double relative_residual = 0.0;
  bool converged = false;
  std::vector<double> history;
};

/// MINRES for symmetric, possibly indefinite A (Paige-Saunders recurrence).
/// If `project` is set it is applied to b and to every new Krylov vector,
/// so the iteration lives in the range of the projector.
KrylovResult minres(const LinearMap& A, const Vec& b, double rtol, int max_iter,
                    const InPlaceMap& project = nullptr);

double vdot(const Vec& a, const Vec& b);
double vnorm(const Vec& a);
/// y += s * x
void vaxpy(double s, const Vec& x, Vec& y);

}  // namespace halfwave
