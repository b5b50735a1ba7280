#include "halfwave/field.hpp"

#include <algorithm>
#include <cmath>

namespace halfwave {

RealField::RealField(const Grid2D& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != g.size()) {
    throw PreconditionError("RealField: sample count does not match grid");
  }
}

RealField RealField::from_function(const Grid2D& g,
                                   const std::function<double(double, double)>& f) {
  RealField out(g);
  const int n = g.points();
  for (int i = 0; i < n; ++i) {
    const double x1 = g.coord(i);
    for (int j = 0; j < n; ++j) out(i, j) = f(x1, g.coord(j));
  }
  return out;
}

RealField& RealField::operator+=(const RealField& o) {
  require_same_grid(grid, o.grid, "RealField::+=");
  for (std::size_t k = 0; k < values.size(); ++k) values[k] += o.values[k];
  return *this;
}

RealField& RealField::operator-=(const RealField& o) {
  require_same_grid(grid, o.grid, "RealField::-=");
  for (std::size_t k = 0; k < values.size(); ++k) values[k] -= o.values[k];
  return *this;
}

RealField& RealField::operator*=(double s) {
  for (double& v : values) v *= s;
  return *this;
}

RealField& RealField::axpy(double s, const RealField& o) {
  require_same_grid(grid, o.grid, "RealField::axpy");
  for (std::size_t k = 0; k < values.size(); ++k) values[k] += s * o.values[k];
  return *this;
}

double RealField::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

bool RealField::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

RealField operator+(RealField a, const RealField& b) { return a += b; }
RealField operator-(RealField a, const RealField& b) { return a -= b; }
RealField operator*(double s, RealField a) { return a *= s; }
RealField operator*(RealField a, double s) { return a *= s; }

RealField hadamard(const RealField& a, const RealField& b) {
  require_same_grid(a.grid, b.grid, "hadamard");
  RealField out(a.grid);
  for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] = a.values[k] * b.values[k];
  return out;
}

ComplexField::ComplexField(const Grid2D& g, std::vector<cplx> v)
    : grid(g), values(std::move(v)) {
  if (values.size() != g.size()) {
    throw PreconditionError("ComplexField: sample count does not match grid");
  }
}

ComplexField::ComplexField(const RealField& re, const RealField& im) : grid(re.grid) {
  require_same_grid(re.grid, im.grid, "ComplexField(re, im)");
  values.resize(re.size());
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = {re.values[k], im.values[k]};
}

ComplexField::ComplexField(const RealField& re) : grid(re.grid) {
  values.resize(re.size());
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = {re.values[k], 0.0};
}

ComplexField ComplexField::from_function(const Grid2D& g,
                                         const std::function<cplx(double, double)>& f) {
  ComplexField out(g);
  const int n = g.points();
  for (int i = 0; i < n; ++i) {
    const double x1 = g.coord(i);
    for (int j = 0; j < n; ++j) out(i, j) = f(x1, g.coord(j));
  }
  return out;
}

RealField ComplexField::real() const {
  RealField out(grid);
  for (std::size_t k = 0; k < values.size(); ++k) out.values[k] = values[k].real();
  return out;
}

RealField ComplexField::imag() const {
  RealField out(grid);
  for (std::size_t k = 0; k < values.size(); ++k) out.values[k] = values[k].imag();
  return out;
}

RealField ComplexField::abs() const {
  RealField out(grid);
  for (std::size_t k = 0; k < values.size(); ++k) out.values[k] = std::abs(values[k]);
  return out;
}

ComplexField& ComplexField::operator+=(const ComplexField& o) {
  require_same_grid(grid, o.grid, "ComplexField::+=");
  for (std::size_t k = 0; k < values.size(); ++k) values[k] += o.values[k];
  return *this;
}

ComplexField& ComplexField::operator-=(const ComplexField& o) {
  require_same_grid(grid, o.grid, "ComplexField::-=");
  for (std::size_t k = 0; k < values.size(); ++k) values[k] -= o.values[k];
  return *this;
}

ComplexField& ComplexField::operator*=(cplx s) {
  for (cplx& v : values) v *= s;
  return *this;
}

double ComplexField::max_abs() const {
  double m = 0.0;
  for (const cplx& v : values) m = std::max(m, std::abs(v));
  return m;
}

bool ComplexField::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](const cplx& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
ComplexField operator*(cplx s, ComplexField a) { return a *= s; }

PairField::PairField(RealField a, RealField b) : f1(std::move(a)), f2(std::move(b)) {
  require_same_grid(f1.grid, f2.grid, "PairField");
}

}  // namespace halfwave
