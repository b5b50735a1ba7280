#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fixtures.hpp"
#include "halfwave/checks.hpp"
#include "halfwave/resample.hpp"
#include "halfwave/spectral.hpp"

using namespace halfwave;

TEST_CASE("affine sampling is exact for band-limited data") {
  const Grid2D g = make_grid(std::numbers::pi, 32);
  auto f = [](double x, double y) { return cplx(std::cos(2 * x + y), std::sin(x - 3 * y)); };
  const ComplexField u = ComplexField::from_function(g, f);
  const Grid2D t = make_grid(1.0, 32);
  const double scale = 0.8;
  const std::array<double, 2> shift{0.3, -0.1};
  const ComplexField s = sample_affine(u, t, scale, shift);
  const ComplexField s2 = AffineSampler(u)(t, scale, shift);
  for (int i = 0; i < 32; ++i) {
    for (int j = 0; j < 32; ++j) {
      const cplx want = f(scale * t.coord(i) + shift[0], scale * t.coord(j) + shift[1]);
      CHECK(std::abs(s(i, j) - want) < 1e-12);
      CHECK(std::abs(s2(i, j) - want) < 1e-12);
    }
  }
  CHECK(sampling_ratio(g, t, scale) == doctest::Approx(scale * t.spacing() / g.spacing()));
}

TEST_CASE("translation by whole cells is a roll") {
  const Grid2D g = make_grid(4.0, 32);
  const ComplexField u = ComplexField::from_function(
      g, [](double x, double y) { return cplx(std::exp(-x * x - y * y), 0.0); });
  const ComplexField v = translate(u, {2 * g.spacing(), 0.0});
  for (int i = 0; i < 32; ++i) CHECK(std::abs(v((i + 2) % 32, 5) - u(i, 5)) < 1e-12);
}

TEST_CASE("deformed operators reduce to L+ and L- at P = 0") {
  const ProfileSet& ps = fixtures::small_ps();
  const GroundState& gs = ps.gs;
  const ComplexField eps(0.1 * gs.Q + lambda_op(gs.Q), gradient(gs.Q, 0));
  const RealField mp = apply_M(Side::plus, eps, ps, ProfileParams{});
  const RealField lp = apply_L(Side::plus, eps.real(), gs);
  const RealField mm = apply_M(Side::minus, eps, ps, ProfileParams{});
  const RealField lm = apply_L(Side::minus, eps.imag(), gs);
  CHECK(l2_norm(mp - lp) <= 1e-10 * l2_norm(lp));
  CHECK(l2_norm(mm - lm) <= 1e-10 * l2_norm(lm));
}

TEST_CASE("deformation of M+ is first order in P") {
  const ProfileSet& ps = fixtures::small_ps();
  const GroundState& gs = ps.gs;
  const ComplexField eps(lambda_op(gs.Q), gs.Q);
  const RealField base = apply_L(Side::plus, eps.real(), gs);
  std::vector<double> x, y;
  for (double a : {4e-2, 2e-2, 1e-2}) {
    x.push_back(a);
    y.push_back(l2_norm(apply_M(Side::plus, eps, ps, ProfileParams{a, {0.0, 0.0}}) - base));
  }
  CHECK(loglog_slope(x, y) >= 0.9);
}

TEST_CASE("skew pairing is antisymmetric") {
  const GroundState& gs = fixtures::small_gs();
  const ComplexField f(gs.Q, lambda_op(gs.Q));
  const ComplexField h(gradient(gs.Q, 0), gs.Q);
  CHECK(skew_pairing(f, h) == doctest::Approx(-skew_pairing(h, f)));
  CHECK(std::abs(skew_pairing(f, f)) < 1e-12);
}

TEST_CASE("rho at P = 0 has a vanishing second component") {
  const ModContext& ctx = fixtures::small_ctx();
  const RhoPair r = rho_at(ctx.rho(), ProfileParams{});
  CHECK(l2_norm(r.rho2) == 0.0);
  const GroundState& gs = ctx.profiles().gs;
  CHECK(l2_norm(apply_L(Side::plus, r.rho1, gs) - ctx.profiles().S10) <=
        1e-9 * l2_norm(ctx.profiles().S10));
}

TEST_CASE("decomposition of Q itself is the identity") {
  const ModContext& ctx = fixtures::small_ctx();
  const ComplexField u(ctx.profiles().gs.Q);
  const ModState st = decompose(u, ctx, ModParams{});
  CHECK(st.params.lambda == doctest::Approx(1.0));
  CHECK(std::abs(st.params.a) < 1e-10);
  CHECK(l2_norm(st.eps) < 1e-9);
}

TEST_CASE("synthesis round trip recovers the parameters") {
  const ModContext& ctx = fixtures::small_ctx();
  ModParams truth;
  truth.lambda = 0.25;
  truth.alpha = {0.01, -0.02};
  truth.gamma = 0.7;
  truth.a = 0.1;
  truth.b = {0.004, -0.002};
  const RoundTrip rt = decomposition_round_trip(ctx, truth);
  CHECK(rt.max_rel_error < 1e-6);
  CHECK(rt.ortho_max < 1e-9);
  CHECK(rt.state.jacobian.has_value());
}

TEST_CASE("cold start locates a shifted bump") {
  const ModContext& ctx = fixtures::small_ctx();
  ModParams truth;
  truth.lambda = 0.5;
  truth.alpha = {0.2, -0.1};
  truth.gamma = 0.3;
  const Grid2D phys(4.0, 256);
  const ComplexField u = synthesize(ctx, truth, phys);
  const ModParams c = cold_start(u, ctx);
  // peak is read off grid points, so lambda is good to O(dx^2 / lambda^2)
  CHECK(c.lambda == doctest::Approx(0.5).epsilon(2e-2));
  CHECK(c.lambda >= 0.5);
  CHECK(c.alpha[0] == doctest::Approx(0.2).epsilon(1e-3));
  CHECK(c.gamma == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("renormalize rejects a window that leaves the box") {
  const ModContext& ctx = fixtures::small_ctx();
  const ComplexField u(ctx.profiles().gs.Q);
  ModParams m;
  m.lambda = 2.0;
  CHECK_THROWS_AS(renormalize(AffineSampler(u), ctx.window(), m), PreconditionError);
}

TEST_CASE("modulation diagnostics on exact series") {
  std::vector<TimedMod> frozen;
  ModParams p;
  p.lambda = 0.5;
  p.a = 0.2;
  p.b = {0.01, 0.0};
  for (int k = 0; k < 5; ++k) frozen.push_back({0.1 * k, p, 0.0});
  const auto rows = mod_diagnostics(frozen);
  for (const auto& r : rows) {
    CHECK(r.a_law == doctest::Approx(0.5 * 0.2 * 0.2));
    CHECK(r.gamma_tilde == doctest::Approx(-1.0));
    CHECK(r.lambda_law == doctest::Approx(0.2));
    CHECK(r.alpha_law[0] == doctest::Approx(-0.01));
    CHECK(r.b_law[0] == doctest::Approx(0.2 * 0.01));
  }

  std::vector<TimedMod> ss;
  for (int k = 0; k < 40; ++k) {
    const double t = -1.0 + 0.01 * k;
    ModParams q;
    q.lambda = t * t / 4.0;
    q.a = -t / 2.0;
    q.b = {0.05 * q.lambda, 0.0};
    q.gamma = -4.0 / t;
    ss.push_back({t, q, 0.0});
  }
  for (const auto& r : mod_diagnostics(ss)) {
    CHECK(std::abs(r.lambda_law) < 1e-3);
    CHECK(std::abs(r.a_law) < 1e-3);
  }
  std::vector<TimedMod> bad = ss;
  std::swap(bad[1], bad[2]);
  CHECK_THROWS_AS(mod_diagnostics(bad), PreconditionError);
}

TEST_CASE("finite-difference Jacobian at Q matches the analytic entries") {
  const JacobianMatch j = jacobian_match(fixtures::small_ctx());
  CHECK(j.max_rel < 1e-4);
  CHECK(j.analytic[1][0] != 0.0);
  CHECK(j.numeric[1][0] == doctest::Approx(j.analytic[1][0]).epsilon(1e-6));
}
