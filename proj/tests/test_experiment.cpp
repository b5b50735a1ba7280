#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "halfwave/experiment.hpp"
#include "halfwave/spectral.hpp"

using namespace halfwave;

TEST_CASE("blowup config validation") {
  BlowupConfig c;
  CHECK_NOTHROW(c.validate());
  c.t_start = 0.1;
  CHECK_THROWS_AS(c.validate(), PreconditionError);
  c = BlowupConfig{};
  c.E0_over_e1 = 0.0;
  CHECK_THROWS_AS(c.validate(), PreconditionError);
  c = BlowupConfig{};
  c.order = 3;
  CHECK_THROWS_AS(c.validate(), PreconditionError);
  CHECK(parse_initial_data("self_similar") == InitialData::self_similar);
  CHECK(std::string(initial_data_name(InitialData::energy_matched)) == "energy_matched");
  CHECK_THROWS_AS(parse_initial_data("other"), PreconditionError);
}

TEST_CASE("self-similar parameters from the constants") {
  BlowupConstants k;
  k.A0 = 1.0;
  k.B0 = {0.1, 0.0};
  k.gamma0 = 0.5;
  const ModParams p = self_similar_params(k, -1.0);
  CHECK(p.lambda == doctest::Approx(0.25));
  CHECK(p.a == doctest::Approx(0.5));
  CHECK(p.b[0] == doctest::Approx(0.025));
  CHECK(p.gamma == doctest::Approx(4.5));

  BlowupConfig cfg;
  cfg.E0_over_e1 = 4.0;
  cfg.P0_over_p1 = {0.05, -0.02};
  const BlowupConstants c = blowup_constants(cfg, fixtures::small_ps());
  CHECK(c.A0 == doctest::Approx(0.5));
  CHECK(c.E0 == doctest::Approx(4.0 * c.e1));
  CHECK(c.B0[1] == doctest::Approx(-0.02));
  CHECK(c.P0[0] == doctest::Approx(0.05 * c.p1));
}

TEST_CASE("phi is C2 across the junctions and convex") {
  const double e2 = std::exp(-2.0);
  CHECK(phi_prime(0.5) == doctest::Approx(0.5));
  CHECK(phi_prime(1.0) == doctest::Approx(1.0));
  CHECK(phi_prime(2.0) == doctest::Approx(3.0 - e2));
  CHECK(phi_prime(5.0) == doctest::Approx(3.0 - std::exp(-5.0)));
  const double h = 1e-7;
  CHECK(phi_prime(1.0 + h) == doctest::Approx(phi_prime(1.0 - h)).epsilon(1e-6));
  CHECK(phi_second(1.0 + h) == doctest::Approx(phi_second(1.0 - h)).epsilon(1e-5));
  CHECK(phi_second(2.0 + h) == doctest::Approx(phi_second(2.0 - h)).epsilon(1e-5));
  CHECK(phi_second(1.5) == doctest::Approx((phi_prime(1.5 + h) - phi_prime(1.5 - h)) / (2 * h)).epsilon(1e-6));
  CHECK(phi_convexity_margin() > 0.0);
}

TEST_CASE("modulation ODE reference") {
  ModParams init;
  init.lambda = 0.25;
  init.a = 0.5;
  init.b = {0.0125, 0.0};
  std::vector<double> t;
  for (int k = 0; k <= 20; ++k) t.push_back(-1.0 + 0.04 * k);
  const auto rows = self_similar_ode_reference(t, init);
  REQUIRE(rows.size() == t.size());
  for (const auto& r : rows) {
    CHECK(r.params.lambda == doctest::Approx(r.t * r.t / 4.0).epsilon(1e-8));
    CHECK(r.params.a == doctest::Approx(0.5 / (1.0 + 0.25 * r.s)).epsilon(1e-9));
    CHECK(r.params.b[0] / r.params.lambda == doctest::Approx(0.05).epsilon(1e-9));
  }
}

namespace {

BlowupSeries synthetic_series(double A0, std::array<double, 2> B0) {
  BlowupSeries s;
  s.constants.A0 = A0;
  s.constants.B0 = B0;
  s.constants.E0 = 1.0;
  s.constants.gamma0 = 0.2;
  for (int k = 0; k < 30; ++k) {
    const double t = -0.5 + 0.01 * k;
    SeriesRow r;
    r.t = t;
    r.params.lambda = t * t / (4 * A0 * A0);
    r.params.a = -t / (2 * A0 * A0);
    r.params.b = {B0[0] * r.params.lambda, B0[1] * r.params.lambda};
    r.params.gamma = 0.2 - 4 * A0 * A0 / t;
    r.half_norm = 3.0 / std::abs(t);
    r.conserved = ConservedTriple{10.0, 1.0, {0.0, 0.0}};
    s.rows.push_back(r);
  }
  return s;
}

}  // namespace

TEST_CASE("fits of an exact self-similar series") {
  const FitReport f = fit_blowup_laws(synthetic_series(1.3, {0.05, -0.01}));
  CHECK(f.lambda_law_max < 1e-10);
  CHECK(f.a_law_max < 1e-10);
  CHECK(f.b_law_max < 1e-10);
  CHECK(f.gamma_drift < 1e-10);
  CHECK(f.half_norm_exponent == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(f.lambda_star_dev) < 1e-10);
  CHECK(f.ode_lambda_dev < 1e-8);
  CHECK(f.ode_a_dev < 1e-8);
  CHECK(f.lambda_monotone);
  CHECK(f.half_norm_monotone);
  FitOptions strict;
  strict.min_decrease = 100.0;
  CHECK_THROWS_AS(fit_blowup_laws(synthetic_series(1.0, {0.0, 0.0}), strict), PreconditionError);
}

TEST_CASE("J_A vanishes at eps = 0 and scales quadratically") {
  const ModContext& ctx = fixtures::small_ctx();
  const GroundState& gs = ctx.profiles().gs;
  ModParams m;
  m.lambda = 0.1;
  CHECK(std::abs(evaluate_J_A(ComplexField(gs.grid()), m, ctx, 10.0)) < 1e-13);
  const ComplexField eps = ComplexField::from_function(gs.grid(), [](double x, double y) {
    const double e = std::exp(-(x * x + y * y) / 2);
    return cplx(1e-3 * e * (1 + x), 1e-3 * e * y);
  });
  const double j1 = evaluate_J_A(eps, m, ctx, 10.0);
  CHECK(j1 > 0.0);
  for (double th : {0.5, 0.25}) {
    const double j = evaluate_J_A(cplx(th) * eps, m, ctx, 10.0);
    CHECK(j / (th * th * j1) == doctest::Approx(1.0).epsilon(0.05));
  }
  m.a = 0.0;
  const double ja = evaluate_J_A(eps, m, ctx, 5.0);
  CHECK(ja == doctest::Approx(evaluate_J_A(eps, m, ctx, 20.0)));
}

TEST_CASE("initial data guard on resolvability") {
  BlowupConfig cfg;
  cfg.t_start = -0.01;
  cfg.L = 1.0;
  cfg.N = 64;
  cfg.profile_L = 8.0;
  cfg.profile_N = 256;
  CHECK_THROWS_AS(make_initial_data(cfg, fixtures::small_ctx()), PreconditionError);
  CHECK(lambda_floor(cfg) >= 8.0 * 2.0 / 64);
}
