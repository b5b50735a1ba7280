#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "halfwave/checks.hpp"
#include "halfwave/evolve.hpp"
#include "halfwave/field_io.hpp"
#include "halfwave/spectral.hpp"

using namespace halfwave;
namespace fs = std::filesystem;

namespace {

ComplexField bump(const Grid2D& g) {
  return dealias(ComplexField::from_function(g, [](double x, double y) {
    const double e = std::exp(-(x * x + y * y));
    return cplx(1.5 * e, 0.3 * x * e);
  }));
}

}  // namespace

TEST_CASE("stepper rejects unsupported orders") {
  const Grid2D g = make_grid(4.0, 32);
  CHECK_THROWS_AS(Stepper(g, StepOptions{true, true, true, 3}), PreconditionError);
  CHECK_THROWS_AS(Stepper(g).advance(ComplexField(g), 0.1, 0), PreconditionError);
  CHECK_THROWS_AS(Stepper(g).step(ComplexField(make_grid(4.0, 64)), 0.1), PreconditionError);
}

TEST_CASE("linear flow is exact on a plane wave") {
  const Grid2D g = make_grid(8.0, 64);
  const double k = 3.0 * std::numbers::pi / 8.0;
  const ComplexField pw =
      ComplexField::from_function(g, [&](double x, double) { return std::polar(1.0, k * x); });
  const ComplexField out = step(pw, 0.3, StepOptions{true, false, true, 2});
  for (int i = 0; i < 64; ++i) CHECK(std::abs(out(i, 7) - std::polar(1.0, k * (g.coord(i) - 0.3))) < 1e-13);
}

TEST_CASE("nonlinear substep is a pointwise phase rotation") {
  const Grid2D g = make_grid(8.0, 64);
  const ComplexField u = ComplexField::from_function(
      g, [](double x, double y) { return cplx(std::exp(-x * x - y * y), 0.0); });
  const ComplexField out = step(u, 0.2, StepOptions{false, true, false, 2});
  for (std::size_t k = 0; k < u.size(); ++k) {
    CHECK(std::abs(out.values[k] - u.values[k] * std::polar(1.0, std::abs(u.values[k]) * 0.2)) < 1e-14);
  }
}

TEST_CASE("fused advance equals repeated steps") {
  const Grid2D g = make_grid(8.0, 64);
  const ComplexField u0 = bump(g);
  for (int order : {2, 4}) {
    Stepper a(g, StepOptions{true, true, true, order});
    ComplexField u = u0;
    for (int k = 0; k < 5; ++k) u = a.step(u, 0.01);
    const ComplexField v = Stepper(g, StepOptions{true, true, true, order}).advance(u0, 0.01, 5);
    CHECK(l2_norm(u - v) < 1e-6 * l2_norm(u));
  }
}

TEST_CASE("integrator study: mass, reversal, energy order") {
  const IntegratorStudy s = integrator_study(200);
  CHECK(s.mass_drift < 1e-12);
  CHECK(s.reversal < 1e-12);
  CHECK(s.energy_order == doctest::Approx(2.0).epsilon(0.1));
  CHECK(s.plane_wave < 1e-13);
}

TEST_CASE("fourth-order composition beats Strang on energy") {
  const Grid2D g = make_grid(8.0, 128);
  const ComplexField u0 = bump(g);
  const double e0 = functionals(u0).energy;
  const double e2 = functionals(Stepper(g).advance(u0, 0.02, 20)).energy;
  const double e4 = functionals(Stepper(g, StepOptions{true, true, true, 4}).advance(u0, 0.02, 20)).energy;
  CHECK(std::abs(e4 - e0) < 0.1 * std::abs(e2 - e0));
}

TEST_CASE("schedule validation") {
  Schedule s;
  s.t_end = s.t_start;
  CHECK_THROWS_AS(s.validate(false), PreconditionError);
  s = Schedule{};
  s.dt = 0.0;
  CHECK_THROWS_AS(s.validate(false), PreconditionError);
  s = Schedule{};
  s.policy = DtPolicy::adaptive;
  CHECK_THROWS_AS(s.validate(false), PreconditionError);
  CHECK_NOTHROW(s.validate(true));
  s.checkpoint_stride = 0;
  CHECK_THROWS_AS(s.validate(true), PreconditionError);
}

TEST_CASE("run logs at the stride and lands on t_end") {
  const Grid2D g = make_grid(8.0, 64);
  Schedule s;
  s.t_start = 0.0;
  s.t_end = 0.105;
  s.dt = 0.01;
  s.checkpoint_stride = 3;
  int calls = 0;
  const RunResult r = run(bump(g), s, {[&](const Sample&, const TrajectoryRow&) { ++calls; }});
  CHECK(r.halt_reason == "reached t_end");
  CHECK(r.t == 0.105);
  CHECK(r.steps == 11);
  REQUIRE(r.log.size() == 5);
  CHECK(r.log[1].t == doctest::Approx(0.03));
  CHECK(calls == 5);
  for (std::size_t k = 1; k < r.log.size(); ++k) {
    CHECK(r.log[k].mass <= r.log[k - 1].mass);
    CHECK(r.log[k].mass == doctest::Approx(r.log[0].mass).epsilon(1e-9));
  }
  const RunResult raw = run(bump(g), s, {}, {}, StepOptions{true, true, false, 2});
  for (const auto& row : raw.log) CHECK(row.mass == doctest::Approx(raw.log[0].mass).epsilon(1e-13));
}

TEST_CASE("run rejects non-finite data and halts on max_steps") {
  const Grid2D g = make_grid(8.0, 64);
  ComplexField u = bump(g);
  Schedule s;
  s.max_steps = 4;
  CHECK(run(u, s).halt_reason == "max_steps");
  u.values[3] = cplx(std::nan(""), 0.0);
  CHECK_THROWS_AS(run(u, s), PreconditionError);
}

TEST_CASE("trajectory csv and checkpoint observer") {
  const fs::path dir = fs::temp_directory_path() / "halfwave_evolve_test";
  fs::remove_all(dir);
  const Grid2D g = make_grid(8.0, 32);
  Schedule s;
  s.t_end = 0.02;
  s.dt = 0.01;
  const RunResult r = run(bump(g), s, {checkpoint_observer(dir.string(), "u")});
  write_trajectory_csv((dir / "traj.csv").string(), r.log);
  std::ifstream in(dir / "traj.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,M,E,P1,P2,lambda,a,b1,b2,half_norm");
  CHECK(fs::exists(dir / "u_000002.hwf"));
  CHECK(read_sidecar((dir / "u_000002.hwf").string())["step"] == 2);
  fs::remove_all(dir);
}
