#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "halfwave/fft.hpp"
#include "halfwave/spectral.hpp"

using namespace halfwave;
using std::numbers::pi;

namespace {

ComplexField random_field(const Grid2D& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexField f(g);
  for (auto& v : f.values) v = cplx(n(rng), n(rng));
  return f;
}

RealField gaussian(const Grid2D& g, double x0 = 0.0, double y0 = 0.0) {
  return RealField::from_function(g, [=](double x, double y) {
    return std::exp(-((x - x0) * (x - x0) + (y - y0) * (y - y0)));
  });
}

}  // namespace

TEST_CASE("make_grid validates its arguments") {
  CHECK_THROWS_AS(make_grid(0.0, 64), PreconditionError);
  CHECK_THROWS_AS(make_grid(-1.0, 64), PreconditionError);
  CHECK_THROWS_AS(make_grid(4.0, 96), PreconditionError);
  CHECK_THROWS_AS(make_grid(4.0, 8), PreconditionError);
  const Grid2D g = make_grid(4.0, 64);
  CHECK(g.spacing() == doctest::Approx(0.125));
  CHECK(g.coord(0) == -4.0);
  CHECK(g.coord(32) == doctest::Approx(0.0));
  CHECK(g.frequency(31) == 31);
  CHECK(g.frequency(32) == -32);
  CHECK(g.wavenumber(1) == doctest::Approx(pi / 4.0));
}

TEST_CASE("fft round trips and in-place variants agree") {
  const Grid2D g = make_grid(2.0, 32);
  const ComplexField f = random_field(g, 1);
  std::vector<cplx> fh(g.size()), back(g.size());
  fft::forward(f.values, fh, 32);
  fft::backward(fh, back, 32);
  double err = 0.0;
  for (std::size_t k = 0; k < back.size(); ++k) err = std::max(err, std::abs(back[k] - f.values[k]));
  CHECK(err < 1e-13);

  std::vector<cplx> ip = f.values;
  fft::forward_inplace(ip, 32);
  double d = 0.0;
  for (std::size_t k = 0; k < ip.size(); ++k) d = std::max(d, std::abs(ip[k] - fh[k]));
  CHECK(d < 1e-12);
  fft::backward_inplace(ip, 32, false);
  for (std::size_t k = 0; k < ip.size(); ++k) ip[k] /= 1024.0;
  err = 0.0;
  for (std::size_t k = 0; k < ip.size(); ++k) err = std::max(err, std::abs(ip[k] - f.values[k]));
  CHECK(err < 1e-13);
}

TEST_CASE("real transforms match the complex ones") {
  const Grid2D g = make_grid(2.0, 32);
  const RealField f = gaussian(g, 0.3, -0.2);
  std::vector<cplx> half(32 * fft::half_cols(32));
  fft::forward_real(f.values, half, 32);
  const std::vector<cplx> full = spectrum(ComplexField(f));
  for (int m = 0; m < 32; ++m) {
    for (int n = 0; n <= 16; ++n) {
      CHECK(std::abs(half[m * 17 + n] - full[m * 32 + n]) < 1e-12);
    }
  }
  std::vector<double> back(g.size());
  fft::backward_real(half, back, 32);
  for (std::size_t k = 0; k < back.size(); ++k) CHECK(back[k] == doctest::Approx(f.values[k]));
}

TEST_CASE("fractional derivative of a plane wave") {
  const Grid2D g = make_grid(pi, 32);
  const ComplexField f = ComplexField::from_function(
      g, [](double x, double y) { return cplx(std::cos(3 * x + 4 * y), 0.0); });
  const ComplexField d = dfrac(f, 1.0);
  const ComplexField h = dfrac(f, 0.5);
  for (std::size_t k = 0; k < f.size(); ++k) {
    CHECK(std::abs(d.values[k] - 5.0 * f.values[k]) < 1e-12);
    CHECK(std::abs(h.values[k] - std::sqrt(5.0) * f.values[k]) < 1e-12);
  }
  const ComplexField inv = dfrac(d, -1.0);
  for (std::size_t k = 0; k < f.size(); ++k) CHECK(std::abs(inv.values[k] - f.values[k]) < 1e-12);
}

TEST_CASE("negative orders reject a nonzero mean") {
  const Grid2D g = make_grid(pi, 32);
  const ComplexField one = ComplexField::from_function(g, [](double, double) { return cplx(1.0); });
  CHECK_THROWS_AS(dfrac(one, -0.5), PreconditionError);
  CHECK_NOTHROW(dfrac(one, 0.5));
}

TEST_CASE("shifted fractional powers compose") {
  const Grid2D g = make_grid(4.0, 64);
  const RealField f = gaussian(g);
  const RealField back = shifted_dfrac(shifted_dfrac(f, 0.5), -0.5);
  CHECK(l2_norm(back - f) < 1e-12 * l2_norm(f));
}

TEST_CASE("gradient of a trigonometric field") {
  const Grid2D g = make_grid(pi, 32);
  const RealField f = RealField::from_function(g, [](double x, double y) {
    return std::sin(2 * x) * std::cos(y);
  });
  const auto d = gradient(f);
  const RealField d1 = RealField::from_function(
      g, [](double x, double y) { return 2 * std::cos(2 * x) * std::cos(y); });
  const RealField d2 = RealField::from_function(
      g, [](double x, double y) { return -std::sin(2 * x) * std::sin(y); });
  CHECK(l2_norm(d[0] - d1) < 1e-12);
  CHECK(l2_norm(d[1] - d2) < 1e-12);
}

TEST_CASE("Lambda is skew-adjoint and matches f + x.grad f in the interior") {
  const Grid2D g = make_grid(8.0, 128);
  const RealField f = gaussian(g, 0.5, 0.0);
  const RealField h = gaussian(g, -0.3, 0.4);
  const RealField Lf = lambda_op(f);
  CHECK(std::abs(dot(Lf, h) + dot(f, lambda_op(h))) < 1e-12);
  CHECK(std::abs(dot(Lf, f)) < 1e-12);
  const RealField exact = RealField::from_function(g, [](double x, double y) {
    const double r2 = (x - 0.5) * (x - 0.5) + y * y;
    return (1.0 - 2.0 * (x * (x - 0.5) + y * y)) * std::exp(-r2);
  });
  CHECK(l2_norm(Lf - exact) < 1e-9 * l2_norm(exact));
  CHECK(l2_norm(lambda_op(f, 2) - lambda_op(Lf)) < 1e-14 * l2_norm(Lf));
}

TEST_CASE("conserved quantities of a plane wave") {
  const Grid2D g = make_grid(pi, 32);
  const double A = 0.7;
  const ComplexField u = ComplexField::from_function(
      g, [&](double x, double y) { return A * std::polar(1.0, 3 * x - 4 * y); });
  double half = 0.0;
  const ConservedTriple c = functionals(u, &half);
  const double area = 4 * pi * pi;
  CHECK(c.mass == doctest::Approx(A * A * area));
  CHECK(c.momentum[0] == doctest::Approx(3 * c.mass));
  CHECK(c.momentum[1] == doctest::Approx(-4 * c.mass));
  CHECK(c.energy == doctest::Approx(0.5 * 5 * c.mass - A * A * A * area / 3.0));
  CHECK(half == doctest::Approx(half_derivative_norm(u)));
  CHECK(half * half == doctest::Approx(5 * c.mass));
}

TEST_CASE("norms in physical and Fourier space agree") {
  const Grid2D g = make_grid(4.0, 64);
  const ComplexField f = random_field(g, 3);
  CHECK(l2_norm(f) == doctest::Approx(l2_norm_fourier(f)).epsilon(1e-12));
  const double h = h_half_norm(f), d = half_derivative_norm(f), m = l2_norm(f);
  CHECK(h * h == doctest::Approx(m * m + d * d));
}

TEST_CASE("dealias removes the outer third and is idempotent") {
  const Grid2D g = make_grid(pi, 32);
  const ComplexField f = random_field(g, 5);
  const ComplexField p = dealias(f);
  const ComplexField pp = dealias(p);
  CHECK(l2_norm(p - pp) < 1e-13 * l2_norm(p));
  const auto s = spectrum(p);
  for (int m1 = 0; m1 < 32; ++m1) {
    for (int m2 = 0; m2 < 32; ++m2) {
      if (std::abs(g.frequency(m1)) > 10 || std::abs(g.frequency(m2)) > 10) {
        CHECK(std::abs(s[m1 * 32 + m2]) < 1e-10);
      }
    }
  }
}

TEST_CASE("reflections and parity projection") {
  const Grid2D g = make_grid(4.0, 64);
  const RealField f = gaussian(g, 0.7, 0.2);
  CHECK(l2_norm(reflect(reflect(f, 0), 0) - f) == 0.0);
  const RealField odd = project_parity(f, -1, 1);
  CHECK(parity_defect(odd, 0, -1) < 1e-14);
  CHECK(parity_defect(odd, 1, 1) < 1e-14);
  const RealField sym = symmetrize_d4(f);
  CHECK(l2_norm(swap_axes(sym) - sym) < 1e-14 * l2_norm(sym));
  CHECK(parity_defect(sym, 0, 1) < 1e-14);
}

TEST_CASE("edge decay guard") {
  const Grid2D g = make_grid(8.0, 64);
  const ComplexField f(gaussian(g));
  CHECK(edge_ratio(f) < 1e-20);
  CHECK_NOTHROW(require_edge_decay(f));
  const ComplexField wide(RealField::from_function(g, [](double x, double) { return std::exp(-std::abs(x) / 4); }));
  CHECK_THROWS_AS(require_edge_decay(wide), PreconditionError);
}

TEST_CASE("dilation generator is exact and agrees with Lambda inside the box") {
  const Grid2D g = make_grid(8.0, 128);
  const RealField f = gaussian(g, 0.5, 0.0);
  const RealField exact = RealField::from_function(g, [](double x, double y) {
    const double r2 = (x - 0.5) * (x - 0.5) + y * y;
    return (1.0 - 2.0 * (x * (x - 0.5) + y * y)) * std::exp(-r2);
  });
  const RealField d = dilation_generator(f);
  CHECK(l2_norm(d - exact) < 1e-10 * l2_norm(exact));
  CHECK(l2_norm(lambda_op(f) - d) < 1e-9 * l2_norm(exact));
  const double h = 1e-5;
  const RealField fd = RealField::from_function(g, [&](double x, double y) {
    auto s = [&](double mu) {
      const double r2 = (mu * x - 0.5) * (mu * x - 0.5) + mu * mu * y * y;
      return mu * std::exp(-r2);
    };
    return (s(1 + h) - s(1 - h)) / (2 * h);
  });
  CHECK(l2_norm(d - fd) < 1e-8 * l2_norm(exact));
}
