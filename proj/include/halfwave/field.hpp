#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "halfwave/grid.hpp"

namespace halfwave {

using cplx = std::complex<double>;

/// Real samples on a Grid2D, row-major (index i*N + j).
struct RealField {
  Grid2D grid;
  std::vector<double> values;

  explicit RealField(const Grid2D& g) : grid(g), values(g.size(), 0.0) {}
  RealField(const Grid2D& g, std::vector<double> v);

  /// Samples f(x1, x2) at every node.
  static RealField from_function(const Grid2D& g,
                                 const std::function<double(double, double)>& f);

  double& operator()(int i, int j) { return values[index(i, j)]; }
  double operator()(int i, int j) const { return values[index(i, j)]; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * grid.points() + j;
  }
  std::size_t size() const { return values.size(); }

  RealField& operator+=(const RealField& o);
  RealField& operator-=(const RealField& o);
  RealField& operator*=(double s);
  /// this += s * o
  RealField& axpy(double s, const RealField& o);

  double max_abs() const;
  bool all_finite() const;
};

RealField operator+(RealField a, const RealField& b);
RealField operator-(RealField a, const RealField& b);
RealField operator*(double s, RealField a);
RealField operator*(RealField a, double s);
/// Pointwise product.
RealField hadamard(const RealField& a, const RealField& b);

/// Complex samples on a Grid2D.
struct ComplexField {
  Grid2D grid;
  std::vector<cplx> values;

  explicit ComplexField(const Grid2D& g) : grid(g), values(g.size(), cplx{}) {}
  ComplexField(const Grid2D& g, std::vector<cplx> v);
  /// f1 + i f2
  ComplexField(const RealField& re, const RealField& im);
  explicit ComplexField(const RealField& re);

  static ComplexField from_function(const Grid2D& g,
                                    const std::function<cplx(double, double)>& f);

  cplx& operator()(int i, int j) { return values[index(i, j)]; }
  cplx operator()(int i, int j) const { return values[index(i, j)]; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * grid.points() + j;
  }
  std::size_t size() const { return values.size(); }

  RealField real() const;
  RealField imag() const;
  RealField abs() const;

  ComplexField& operator+=(const ComplexField& o);
  ComplexField& operator-=(const ComplexField& o);
  ComplexField& operator*=(cplx s);

  double max_abs() const;
  bool all_finite() const;
};

ComplexField operator+(ComplexField a, const ComplexField& b);
ComplexField operator-(ComplexField a, const ComplexField& b);
ComplexField operator*(cplx s, ComplexField a);

/// Vector form f = [Re f, Im f]^T of a complex field.
struct PairField {
  RealField f1;
  RealField f2;

  PairField(RealField a, RealField b);
  explicit PairField(const ComplexField& f) : PairField(f.real(), f.imag()) {}

  const Grid2D& grid() const { return f1.grid; }
  ComplexField to_complex() const { return ComplexField(f1, f2); }
};

}  // namespace halfwave
