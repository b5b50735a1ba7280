#pragma once

#include <array>
#include <vector>

#include "halfwave/field.hpp"
#include "halfwave/grid.hpp"

namespace halfwave {

/// Mass, energy and momentum of a field.
struct ConservedTriple {
  double mass = 0.0;
  double energy = 0.0;
  std::array<double, 2> momentum{0.0, 0.0};
};

/// Fourier coefficients (unnormalized FFT) of a field.
std::vector<cplx> spectrum(const ComplexField& f);
ComplexField from_spectrum(const Grid2D& g, const std::vector<cplx>& fh);

/// D^s as the multiplier |k|^s. For s < 0 the zero mode must vanish
/// relative to ||f|| * 2L (zero_mode_tol) and is mapped to zero.
ComplexField dfrac(const ComplexField& f, double s, double zero_mode_tol = 1e-10);
RealField dfrac(const RealField& f, double s, double zero_mode_tol = 1e-10);

/// (D + 1)^s, defined for every real s.
RealField shifted_dfrac(const RealField& f, double s);
ComplexField shifted_dfrac(const ComplexField& f, double s);

/// Spectral partial derivative along axis 0 (x1) or 1 (x2). The Nyquist
/// row/column is dropped so real fields stay real.
ComplexField gradient(const ComplexField& f, int axis);
RealField gradient(const RealField& f, int axis);
std::array<RealField, 2> gradient(const RealField& f);

/// Lambda f = f + x . grad f in the skew-adjoint form
/// (X . grad f + div(X f)) / 2, where X equals x away from the boundary and
/// is rolled off smoothly to 0 over the outer quarter of the box. Applied
/// `iterate` times.
ComplexField lambda_op(const ComplexField& f, int iterate = 1);
RealField lambda_op(const RealField& f, int iterate = 1);
/// f + x . grad f with the plain coordinate x, pointwise. This is
/// d/dmu [mu f(mu x)] at mu = 1 for the trigonometric interpolant.
RealField dilation_generator(const RealField& f);

/// Real L2 pairing Re int f conj(g).
double dot(const RealField& f, const RealField& g);
double dot(const ComplexField& f, const ComplexField& g);
double l2_norm(const RealField& f);
double l2_norm(const ComplexField& f);
/// ||f||_2 evaluated from Fourier coefficients.
double l2_norm_fourier(const ComplexField& f);
double integral(const RealField& f);

/// ||D^{1/2} u||_2.
double half_derivative_norm(const ComplexField& u);
/// (||u||_2^2 + ||D^{1/2}u||_2^2)^{1/2}
double h_half_norm(const ComplexField& u);
/// (||u||_2^2 + ||grad u||_2^2)^{1/2}
double h1_norm(const ComplexField& u);

/// Mass, energy (1/2 <u,Du> - 1/3 int |u|^3) and momentum Re int -i grad u conj(u).
/// Throws if the discarded imaginary part of the momentum exceeds 1e-10 * mass.
ConservedTriple functionals(const ComplexField& u, double* half_norm = nullptr);
/// Momentum of the pair form, 2 int f1 grad f2.
std::array<double, 2> momentum_pair(const PairField& f);

/// 2/3-rule: zero every mode with |n| > N/3 along either axis.
ComplexField dealias(const ComplexField& f);
RealField dealias(const RealField& f);
void dealias_spectrum(std::vector<cplx>& fh, int n);

/// Reflection x_axis -> -x_axis (node i -> (N - i) mod N).
RealField reflect(const RealField& f, int axis);
ComplexField reflect(const ComplexField& f, int axis);
RealField swap_axes(const RealField& f);
/// Average over the 8 lattice symmetries of the square.
RealField symmetrize_d4(const RealField& f);
/// Projects onto parity sector (p1, p2), each +1 (even) or -1 (odd).
RealField project_parity(const RealField& f, int p1, int p2);
/// ||f - p R_axis f|| / ||f||.
double parity_defect(const RealField& f, int axis, int parity);

/// max |f| within `cells` of the box boundary divided by max |f|.
double edge_ratio(const RealField& f, int cells = 4);
double edge_ratio(const ComplexField& f, int cells = 4);
/// Throws PreconditionError when edge_ratio exceeds tol.
void require_edge_decay(const ComplexField& f, double tol = 1e-8, int cells = 4);

/// |k| on the full N x N lattice (cached per grid, flat index order).
const std::vector<double>& abs_wavenumbers(const Grid2D& g);

}  // namespace halfwave
