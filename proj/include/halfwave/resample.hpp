#pragma once

#include <array>

#include "halfwave/field.hpp"

namespace halfwave {

/// Evaluates the trigonometric interpolant of u at the affine image of the
/// target nodes: out(y) = u(scale * y + shift). The Nyquist mode is split
/// symmetrically so real data stays real. Each axis is done with a
/// chirp-z (Bluestein) transform.
ComplexField sample_affine(const ComplexField& u, const Grid2D& target, double scale,
                           const std::array<double, 2>& shift);
RealField sample_affine(const RealField& u, const Grid2D& target, double scale,
                        const std::array<double, 2>& shift);

/// sample_affine with the source spectrum computed once.
class AffineSampler {
 public:
  explicit AffineSampler(const ComplexField& u);
  ComplexField operator()(const Grid2D& target, double scale,
                          const std::array<double, 2>& shift) const;
  const Grid2D& source_grid() const { return grid_; }

 private:
  Grid2D grid_;
  std::vector<cplx> spectrum_;
};

/// out(x) = u(x - x0) on the same periodic grid, by Fourier phase shift.
ComplexField translate(const ComplexField& u, const std::array<double, 2>& x0);

/// Ratio of the sample spacing scale * dy to the source spacing dx.
double sampling_ratio(const Grid2D& source, const Grid2D& target, double scale);

}  // namespace halfwave
