#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "halfwave/krylov.hpp"
#include "halfwave/linops.hpp"
#include "halfwave/spectral.hpp"

using namespace halfwave;

TEST_CASE("ground state converges, is positive and has the square's symmetry") {
  const GroundState& gs = fixtures::small_gs();
  CHECK(gs.residual <= 1e-11);
  CHECK(l2_norm(ground_state_residual(gs.Q)) <= 1e-11 * l2_norm(gs.Q));
  CHECK(gs.mass_sq == doctest::Approx(dot(gs.Q, gs.Q)));
  CHECK(gs.multiplier == doctest::Approx(1.0).epsilon(1e-8));
  const int n = gs.grid().points();
  CHECK(gs.Q(n / 2, n / 2) == doctest::Approx(gs.Q.max_abs()));
  double lowest = 0.0;
  for (double v : gs.Q.values) lowest = std::min(lowest, v);
  CHECK(lowest > -1e-10 * gs.Q.max_abs());
  CHECK(parity_defect(gs.Q, 0, 1) < 1e-12);
  CHECK(l2_norm(swap_axes(gs.Q) - gs.Q) < 1e-12 * l2_norm(gs.Q));
  CHECK(gs.history.size() >= 2);
}

TEST_CASE("ground state reports failure to converge") {
  CHECK_THROWS_AS(solve_ground_state(make_grid(8.0, 64), 1e-12, 3), ConvergenceError);
  try {
    solve_ground_state(make_grid(8.0, 64), 1e-12, 3);
  } catch (const ConvergenceError& e) {
    CHECK(e.history().size() == 3);
  }
}

TEST_CASE("MINRES solves a symmetric indefinite system") {
  const Vec d{3.0, -2.0, 1.0, -0.5, 4.0};
  LinearMap A = [&](const Vec& in, Vec& out) {
    for (std::size_t k = 0; k < in.size(); ++k) out[k] = d[k] * in[k];
  };
  const Vec b{1.0, 2.0, 3.0, 4.0, 5.0};
  const KrylovResult r = minres(A, b, 1e-12, 50);
  CHECK(r.converged);
  for (std::size_t k = 0; k < b.size(); ++k) CHECK(r.x[k] == doctest::Approx(b[k] / d[k]));
}

TEST_CASE("MINRES stays in the range of a projector") {
  const Vec d{0.0, 2.0, -1.0, 3.0};
  LinearMap A = [&](const Vec& in, Vec& out) {
    for (std::size_t k = 0; k < in.size(); ++k) out[k] = d[k] * in[k];
  };
  InPlaceMap P = [](Vec& v) { v[0] = 0.0; };
  const KrylovResult r = minres(A, {5.0, 2.0, 1.0, 3.0}, 1e-12, 50, P);
  CHECK(r.converged);
  CHECK(r.x[0] == 0.0);
  CHECK(r.x[1] == doctest::Approx(1.0));
  CHECK(r.x[2] == doctest::Approx(-1.0));
}

TEST_CASE("linearized operators are linear, symmetric and preserve parity") {
  const GroundState& gs = fixtures::small_gs();
  const Grid2D& g = gs.grid();
  const RealField f = RealField::from_function(g, [](double x, double y) {
    return std::exp(-(x - 0.3) * (x - 0.3) - y * y);
  });
  const RealField h = RealField::from_function(g, [](double x, double y) {
    return x * std::exp(-x * x - (y + 0.2) * (y + 0.2));
  });
  for (Side s : {Side::plus, Side::minus}) {
    const RealField lhs = apply_L(s, 2.0 * f + h, gs);
    const RealField rhs = 2.0 * apply_L(s, f, gs) + apply_L(s, h, gs);
    CHECK(l2_norm(lhs - rhs) < 1e-12 * l2_norm(lhs));
    const double a = dot(apply_L(s, f, gs), h), b = dot(f, apply_L(s, h, gs));
    CHECK(std::abs(a - b) < 1e-11 * l2_norm(f) * l2_norm(h));
    const RealField odd = project_parity(h, -1, 1);
    CHECK(parity_defect(apply_L(s, odd, gs), 0, -1) < 1e-12);
  }
}

TEST_CASE("kernel vectors are orthonormal and nearly annihilated") {
  const GroundState& gs = fixtures::small_gs();
  const KernelBasis kp = kernel_basis(Side::plus, gs);
  REQUIRE(kp.vectors.size() == 2);
  CHECK(dot(kp.vectors[0], kp.vectors[0]) == doctest::Approx(1.0));
  CHECK(std::abs(dot(kp.vectors[0], kp.vectors[1])) < 1e-10);
  const KernelBasis km = kernel_basis(Side::minus, gs);
  REQUIRE(km.vectors.size() == 1);
  CHECK(l2_norm(apply_L(Side::minus, km.vectors[0], gs)) < 1e-10);
}

TEST_CASE("solve_L inverts L on the kernel complement") {
  const GroundState& gs = fixtures::small_gs();
  const RealField rhs = lambda_op(gs.Q);
  SolveReport rep;
  SolveOptions opts;
  opts.sector = Parity{1, 1};
  const RealField S = solve_L(Side::minus, rhs, gs, opts, &rep);
  CHECK(l2_norm(apply_L(Side::minus, S, gs) - rhs) <= 10 * opts.tol * l2_norm(rhs));
  CHECK(std::abs(dot(S, gs.Q)) <= 1e-9 * l2_norm(S) * l2_norm(gs.Q));
  CHECK(rep.pairing < 1e-6);

  const RealField rhs_odd = -1.0 * gradient(gs.Q, 0);
  opts.sector = odd_along(0);
  const RealField S01 = solve_L(Side::minus, rhs_odd, gs, opts);
  CHECK(parity_defect(S01, 0, -1) < 1e-12);
}

TEST_CASE("solve_L rejects a right-hand side along the kernel") {
  const GroundState& gs = fixtures::small_gs();
  CHECK_THROWS_AS(solve_L(Side::minus, gs.Q, gs), SolvabilityError);
  try {
    solve_L(Side::minus, gs.Q, gs);
  } catch (const SolvabilityError& e) {
    CHECK(e.pairing() == doctest::Approx(1.0));
  }
  CHECK_NOTHROW(solve_L(Side::plus, gs.Q, gs));
}

TEST_CASE("L- has its minimum at zero without constraints and is positive on Q-perp") {
  const GroundState& gs = fixtures::small_gs();
  const EigenReport free = min_rayleigh_quotient(Side::minus, gs, {});
  CHECK(std::abs(free.value) < 1e-6);
  const auto [plus, minus] = coercivity_estimate(gs, {gs.Q, fixtures::small_ps().S10,
                                                      fixtures::small_ps().S01[0],
                                                      fixtures::small_ps().S01[1]},
                                                 {gs.Q});
  CHECK(minus > 1e-3);
  CHECK(plus > 1e-3);
}
