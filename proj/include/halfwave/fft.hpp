#pragma once

#include <complex>
#include <span>

namespace halfwave::fft {

using cplx = std::complex<double>;

// 2D transforms on N x N row-major arrays. Forward is unnormalized,
// backward divides by N^2, so backward(forward(f)) == f.
void forward(std::span<const cplx> in, std::span<cplx> out, int n);
void backward(std::span<const cplx> in, std::span<cplx> out, int n);
// In-place variants; backward_inplace skips the 1/N^2 factor unless normalize.
void forward_inplace(std::span<cplx> data, int n);
void backward_inplace(std::span<cplx> data, int n, bool normalize = true);

// Real-to-half-complex variants. Spectra have n * (n/2 + 1) entries,
// row index over axis 1 (all n frequencies), column over axis 2 (0..n/2).
void forward_real(std::span<const double> in, std::span<cplx> out, int n);
void backward_real(std::span<const cplx> in, std::span<double> out, int n);

// In-place unnormalized 1D transform; inverse uses the +i sign.
void transform_1d(std::span<cplx> data, bool inverse);

inline int half_cols(int n) { return n / 2 + 1; }

}  // namespace halfwave::fft
