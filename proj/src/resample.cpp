#include "halfwave/resample.hpp"

#include <cmath>
#include <numbers>

#include "halfwave/fft.hpp"
#include "halfwave/spectral.hpp"

namespace halfwave {

namespace {

cplx unit_phase(double x) { return std::polar(1.0, std::remainder(x, 2.0 * std::numbers::pi)); }

int fft_size_at_least(int m) {
  int p = 1;
  while (p < m) p <<= 1;
  return p;
}

// Evaluates sum_n c_n exp(i n (phi0 + p delta)), n = -N/2..N/2, p = 0..M-1.
class ChirpZ {
 public:
  ChirpZ(int n, int m, double phi0, double delta)
      : n_(n), m_(m), p_(fft_size_at_least(n + m)), pre_(n + 1), post_(m), bhat_(p_) {
    const int h = n / 2;
    for (int q = 0; q <= n; ++q) {
      const double nn = q - h;
      pre_[q] = unit_phase(nn * phi0 + 0.5 * delta * double(q) * q);
    }
    for (int p = 0; p < m; ++p) {
      post_[p] = unit_phase(-double(h) * p * delta + 0.5 * delta * double(p) * p);
    }
    for (int k = -n; k < m; ++k) {
      bhat_[(k + p_) % p_] = unit_phase(-0.5 * delta * double(k) * k);
    }
    fft::transform_1d(bhat_, false);
    work_.resize(p_);
  }

  // coeffs: N values in FFT order; writes M samples (unnormalized).
  void apply(const cplx* coeffs, std::ptrdiff_t stride, cplx* out, std::ptrdiff_t ostride) {
    const int h = n_ / 2;
    std::fill(work_.begin(), work_.end(), cplx{});
    for (int m = 0; m < n_; ++m) {
      const int freq = m < h ? m : m - n_;
      const cplx c = coeffs[m * stride];
      if (freq == -h) {
        work_[0] += 0.5 * c * pre_[0];
        work_[n_] += 0.5 * c * pre_[n_];
      } else {
        work_[freq + h] = c * pre_[freq + h];
      }
    }
    fft::transform_1d(work_, false);
    for (int k = 0; k < p_; ++k) work_[k] *= bhat_[k];
    fft::transform_1d(work_, true);
    const double inv = 1.0 / p_;
    for (int p = 0; p < m_; ++p) out[p * ostride] = work_[p] * inv * post_[p];
  }

 private:
  int n_, m_, p_;
  std::vector<cplx> pre_, post_, bhat_, work_;
};

}  // namespace

double sampling_ratio(const Grid2D& source, const Grid2D& target, double scale) {
  return scale * target.spacing() / source.spacing();
}

AffineSampler::AffineSampler(const ComplexField& u) : grid_(u.grid), spectrum_(spectrum(u)) {}

ComplexField AffineSampler::operator()(const Grid2D& target, double scale,
                                       const std::array<double, 2>& shift) const {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw PreconditionError("sample_affine: scale must be positive");
  }
  const Grid2D& g = grid_;
  const int n = g.points(), m = target.points();
  const double theta = std::numbers::pi / g.half_width();
  const double h = scale * target.spacing();

  auto start = [&](int axis) { return scale * target.coord(0) + shift[axis] + g.half_width(); };
  ChirpZ along2(n, m, theta * start(1), theta * h);
  std::vector<cplx> mid(static_cast<std::size_t>(n) * m);
  for (int r = 0; r < n; ++r) {
    along2.apply(&spectrum_[std::size_t(r) * n], 1, &mid[std::size_t(r) * m], 1);
  }
  ChirpZ along1(n, m, theta * start(0), theta * h);
  ComplexField out(target);
  for (int c = 0; c < m; ++c) along1.apply(&mid[c], m, &out.values[c], m);
  const double norm = 1.0 / (double(n) * n);
  for (cplx& v : out.values) v *= norm;
  return out;
}

ComplexField sample_affine(const ComplexField& u, const Grid2D& target, double scale,
                           const std::array<double, 2>& shift) {
  return AffineSampler(u)(target, scale, shift);
}

RealField sample_affine(const RealField& u, const Grid2D& target, double scale,
                        const std::array<double, 2>& shift) {
  return sample_affine(ComplexField(u), target, scale, shift).real();
}

ComplexField translate(const ComplexField& u, const std::array<double, 2>& x0) {
  const Grid2D& g = u.grid;
  const int n = g.points();
  std::vector<cplx> uh = spectrum(u);
  std::vector<cplx> p1(n), p2(n);
  for (int m = 0; m < n; ++m) {
    const double k = g.wavenumber(m);
    if (g.frequency(m) == -n / 2) {
      p1[m] = std::cos(k * x0[0]);
      p2[m] = std::cos(k * x0[1]);
    } else {
      p1[m] = unit_phase(-k * x0[0]);
      p2[m] = unit_phase(-k * x0[1]);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) uh[std::size_t(i) * n + j] *= p1[i] * p2[j];
  }
  return from_spectrum(g, uh);
}

}  // namespace halfwave
