#include "halfwave/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "halfwave/fft.hpp"

namespace halfwave {

namespace {

// Applies sym(k1, k2, m1, m2) to a complex field in Fourier space.
template <class Sym>
ComplexField complex_multiply(const ComplexField& f, Sym sym) {
  const Grid2D& g = f.grid;
  const int n = g.points();
  std::vector<cplx> fh(f.size());
  fft::forward(f.values, fh, n);
  for (int m1 = 0; m1 < n; ++m1) {
    const double k1 = g.wavenumber(m1);
    for (int m2 = 0; m2 < n; ++m2) {
      fh[static_cast<std::size_t>(m1) * n + m2] *= sym(k1, g.wavenumber(m2), m1, m2);
    }
  }
  ComplexField out(g);
  fft::backward(fh, out.values, n);
  return out;
}

// Same on the half spectrum of a real field; column c is frequency c, with
// the Nyquist column c = N/2 standing for -N/2.
template <class Sym>
RealField real_multiply(const RealField& f, Sym sym) {
  const Grid2D& g = f.grid;
  const int n = g.points();
  const int hc = fft::half_cols(n);
  std::vector<cplx> fh(static_cast<std::size_t>(n) * hc);
  fft::forward_real(f.values, fh, n);
  for (int m1 = 0; m1 < n; ++m1) {
    const double k1 = g.wavenumber(m1);
    for (int c = 0; c < hc; ++c) {
      fh[static_cast<std::size_t>(m1) * hc + c] *= sym(k1, g.wavenumber(c), m1, c);
    }
  }
  RealField out(g);
  fft::backward_real(fh, out.values, n);
  return out;
}

double pow_abs(double k, double s) { return k == 0.0 ? 0.0 : std::pow(k, s); }

void check_zero_mode(const Grid2D& g, double mean_integral, double norm, double tol) {
  const double scale = norm * 2.0 * g.half_width();
  if (std::abs(mean_integral) > tol * std::max(scale, 1e-300)) {
    throw PreconditionError("dfrac: negative order needs a zero-mean field (integral " +
                            std::to_string(mean_integral) + ")");
  }
}

bool is_nyquist(int m, int n) { return m == n / 2; }

// Coordinate used by Lambda. At node 0 the periodic sawtooth jumps from L to
// -L; the midpoint value 0 keeps x odd under i -> (N - i) mod N.
double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

// x in the interior, rolled off to 0 over the outer quarter of the box.
std::vector<double> dilation_coords(const Grid2D& g) {
  const int n = g.points();
  const double w = 0.25 * g.half_width();
  std::vector<double> X(n);
  for (int i = 0; i < n; ++i) {
    const double x = g.coord(i);
    X[i] = x * smooth_step((g.half_width() - std::abs(x)) / w);
  }
  return X;
}

}  // namespace

std::vector<cplx> spectrum(const ComplexField& f) {
  std::vector<cplx> fh(f.size());
  fft::forward(f.values, fh, f.grid.points());
  return fh;
}

ComplexField from_spectrum(const Grid2D& g, const std::vector<cplx>& fh) {
  ComplexField out(g);
  fft::backward(fh, out.values, g.points());
  return out;
}

ComplexField dfrac(const ComplexField& f, double s, double zero_mode_tol) {
  if (s < -1.0) throw PreconditionError("dfrac: order must be >= -1");
  if (s < 0.0) {
    cplx sum = 0.0;
    for (const cplx& v : f.values) sum += v;
    check_zero_mode(f.grid, std::abs(sum) * f.grid.cell_area(), l2_norm(f), zero_mode_tol);
  }
  if (s == 0.0) return f;
  return complex_multiply(f, [s](double k1, double k2, int, int) {
    return cplx(pow_abs(std::hypot(k1, k2), s), 0.0);
  });
}

RealField dfrac(const RealField& f, double s, double zero_mode_tol) {
  if (s < -1.0) throw PreconditionError("dfrac: order must be >= -1");
  if (s < 0.0) check_zero_mode(f.grid, integral(f), l2_norm(f), zero_mode_tol);
  if (s == 0.0) return f;
  return real_multiply(f, [s](double k1, double k2, int, int) {
    return cplx(pow_abs(std::hypot(k1, k2), s), 0.0);
  });
}

RealField shifted_dfrac(const RealField& f, double s) {
  return real_multiply(f, [s](double k1, double k2, int, int) {
    return cplx(std::pow(std::hypot(k1, k2) + 1.0, s), 0.0);
  });
}

ComplexField shifted_dfrac(const ComplexField& f, double s) {
  return complex_multiply(f, [s](double k1, double k2, int, int) {
    return cplx(std::pow(std::hypot(k1, k2) + 1.0, s), 0.0);
  });
}

ComplexField gradient(const ComplexField& f, int axis) {
  if (axis != 0 && axis != 1) throw PreconditionError("gradient: axis must be 0 or 1");
  const int n = f.grid.points();
  return complex_multiply(f, [axis, n](double k1, double k2, int m1, int m2) {
    const int m = axis == 0 ? m1 : m2;
    if (is_nyquist(m, n)) return cplx(0.0, 0.0);
    return cplx(0.0, axis == 0 ? k1 : k2);
  });
}

RealField gradient(const RealField& f, int axis) {
  if (axis != 0 && axis != 1) throw PreconditionError("gradient: axis must be 0 or 1");
  const int n = f.grid.points();
  return real_multiply(f, [axis, n](double k1, double k2, int m1, int c) {
    const int m = axis == 0 ? m1 : c;
    if (is_nyquist(m, n)) return cplx(0.0, 0.0);
    return cplx(0.0, axis == 0 ? k1 : k2);
  });
}

std::array<RealField, 2> gradient(const RealField& f) {
  const Grid2D& g = f.grid;
  const int n = g.points();
  const int hc = fft::half_cols(n);
  std::vector<cplx> fh(static_cast<std::size_t>(n) * hc);
  fft::forward_real(f.values, fh, n);
  std::vector<cplx> d1(fh.size()), d2(fh.size());
  for (int m1 = 0; m1 < n; ++m1) {
    const double k1 = is_nyquist(m1, n) ? 0.0 : g.wavenumber(m1);
    for (int c = 0; c < hc; ++c) {
      const double k2 = is_nyquist(c, n) ? 0.0 : g.wavenumber(c);
      const std::size_t idx = static_cast<std::size_t>(m1) * hc + c;
      d1[idx] = cplx(0.0, k1) * fh[idx];
      d2[idx] = cplx(0.0, k2) * fh[idx];
    }
  }
  RealField g1(g), g2(g);
  fft::backward_real(d1, g1.values, n);
  fft::backward_real(d2, g2.values, n);
  return {std::move(g1), std::move(g2)};
}

template <class Field>
Field lambda_skew(const Field& f, int iterate) {
  if (iterate < 1) throw PreconditionError("lambda_op: iterate must be >= 1");
  Field cur = f;
  const Grid2D& g = f.grid;
  const int n = g.points();
  const std::vector<double> X = dilation_coords(g);
  for (int it = 0; it < iterate; ++it) {
    Field xf1 = cur, xf2 = cur;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const std::size_t k = cur.index(i, j);
        xf1.values[k] *= X[i];
        xf2.values[k] *= X[j];
      }
    }
    const Field g1 = gradient(cur, 0);
    const Field g2 = gradient(cur, 1);
    const Field d1 = gradient(xf1, 0);
    const Field d2 = gradient(xf2, 1);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const std::size_t k = cur.index(i, j);
        cur.values[k] = 0.5 * (X[i] * g1.values[k] + X[j] * g2.values[k] +
                               d1.values[k] + d2.values[k]);
      }
    }
  }
  return cur;
}

ComplexField lambda_op(const ComplexField& f, int iterate) { return lambda_skew(f, iterate); }

RealField lambda_op(const RealField& f, int iterate) { return lambda_skew(f, iterate); }

RealField dilation_generator(const RealField& f) {
  const auto d = gradient(f);
  const Grid2D& g = f.grid;
  RealField out = f;
  for (int i = 0; i < g.points(); ++i) {
    for (int j = 0; j < g.points(); ++j) {
      out(i, j) += g.coord(i) * d[0](i, j) + g.coord(j) * d[1](i, j);
    }
  }
  return out;
}

double dot(const RealField& f, const RealField& g) {
  require_same_grid(f.grid, g.grid, "dot");
  double s = 0.0;
  for (std::size_t k = 0; k < f.values.size(); ++k) s += f.values[k] * g.values[k];
  return s * f.grid.cell_area();
}

double dot(const ComplexField& f, const ComplexField& g) {
  require_same_grid(f.grid, g.grid, "dot");
  double s = 0.0;
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    s += f.values[k].real() * g.values[k].real() + f.values[k].imag() * g.values[k].imag();
  }
  return s * f.grid.cell_area();
}

double l2_norm(const RealField& f) { return std::sqrt(dot(f, f)); }
double l2_norm(const ComplexField& f) { return std::sqrt(dot(f, f)); }

double l2_norm_fourier(const ComplexField& f) {
  const auto fh = spectrum(f);
  double s = 0.0;
  for (const cplx& v : fh) s += std::norm(v);
  const double n2 = static_cast<double>(f.size());
  return std::sqrt(s / n2 * f.grid.cell_area());
}

double integral(const RealField& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return s * f.grid.cell_area();
}

double half_derivative_norm(const ComplexField& u) {
  const auto uh = spectrum(u);
  const auto& kabs = abs_wavenumbers(u.grid);
  double s = 0.0;
  for (std::size_t k = 0; k < uh.size(); ++k) s += kabs[k] * std::norm(uh[k]);
  return std::sqrt(s / static_cast<double>(u.size()) * u.grid.cell_area());
}

double h_half_norm(const ComplexField& u) {
  const double a = l2_norm(u);
  const double b = half_derivative_norm(u);
  return std::sqrt(a * a + b * b);
}

double h1_norm(const ComplexField& u) {
  const auto uh = spectrum(u);
  const auto& kabs = abs_wavenumbers(u.grid);
  double s = 0.0;
  for (std::size_t k = 0; k < uh.size(); ++k) s += (1.0 + kabs[k] * kabs[k]) * std::norm(uh[k]);
  return std::sqrt(s / static_cast<double>(u.size()) * u.grid.cell_area());
}

ConservedTriple functionals(const ComplexField& u, double* half_norm) {
  ConservedTriple out;
  const Grid2D& g = u.grid;
  const double da = g.cell_area();
  double cube = 0.0;
  for (const cplx& v : u.values) {
    const double m = std::abs(v);
    out.mass += m * m;
    cube += m * m * m;
  }
  out.mass *= da;
  cube *= da;
  // Parseval; the momentum multipliers drop the Nyquist row and column like gradient().
  const auto uh = spectrum(u);
  const auto& kabs = abs_wavenumbers(g);
  const int n = g.points();
  double dh = 0.0, p1 = 0.0, p2 = 0.0;
  for (int m1 = 0; m1 < n; ++m1) {
    const double k1 = m1 == n / 2 ? 0.0 : g.wavenumber(m1);
    for (int m2 = 0; m2 < n; ++m2) {
      const double k2 = m2 == n / 2 ? 0.0 : g.wavenumber(m2);
      const std::size_t idx = std::size_t(m1) * n + m2;
      const double w = std::norm(uh[idx]);
      dh += kabs[idx] * w;
      p1 += k1 * w;
      p2 += k2 * w;
    }
  }
  const double norm = da / static_cast<double>(u.size());
  dh *= norm;
  out.energy = 0.5 * dh - cube / 3.0;
  out.momentum = {p1 * norm, p2 * norm};
  if (half_norm) *half_norm = std::sqrt(dh);
  return out;
}

std::array<double, 2> momentum_pair(const PairField& f) {
  auto [d1, d2] = gradient(f.f2);
  return {2.0 * dot(f.f1, d1), 2.0 * dot(f.f1, d2)};
}

void dealias_spectrum(std::vector<cplx>& fh, int n) {
  const int cut = n / 3;
  for (int m1 = 0; m1 < n; ++m1) {
    const int n1 = m1 < n / 2 ? m1 : m1 - n;
    const bool drop_row = std::abs(n1) > cut;
    for (int m2 = 0; m2 < n; ++m2) {
      const int n2 = m2 < n / 2 ? m2 : m2 - n;
      if (drop_row || std::abs(n2) > cut) fh[static_cast<std::size_t>(m1) * n + m2] = 0.0;
    }
  }
}

ComplexField dealias(const ComplexField& f) {
  auto fh = spectrum(f);
  dealias_spectrum(fh, f.grid.points());
  return from_spectrum(f.grid, fh);
}

RealField dealias(const RealField& f) {
  const int n = f.grid.points();
  const int cut = n / 3;
  return real_multiply(f, [n, cut](double, double, int m1, int c) {
    const int n1 = m1 < n / 2 ? m1 : m1 - n;
    const int n2 = c < n / 2 ? c : c - n;
    return (std::abs(n1) > cut || std::abs(n2) > cut) ? cplx(0.0) : cplx(1.0);
  });
}

namespace {
template <class F>
F reflect_impl(const F& f, int axis) {
  if (axis != 0 && axis != 1) throw PreconditionError("reflect: axis must be 0 or 1");
  const int n = f.grid.points();
  F out(f.grid);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int si = axis == 0 ? (n - i) % n : i;
      const int sj = axis == 1 ? (n - j) % n : j;
      out(i, j) = f(si, sj);
    }
  }
  return out;
}
}  // namespace

RealField reflect(const RealField& f, int axis) { return reflect_impl(f, axis); }
ComplexField reflect(const ComplexField& f, int axis) { return reflect_impl(f, axis); }

RealField swap_axes(const RealField& f) {
  const int n = f.grid.points();
  RealField out(f.grid);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = f(j, i);
  return out;
}

RealField symmetrize_d4(const RealField& f) {
  const int n = f.grid.points();
  RealField out(f.grid);
  for (int i = 0; i < n; ++i) {
    const int ri = (n - i) % n;
    for (int j = 0; j < n; ++j) {
      const int rj = (n - j) % n;
      out(i, j) = 0.125 * (f(i, j) + f(ri, j) + f(i, rj) + f(ri, rj) + f(j, i) + f(rj, i) +
                           f(j, ri) + f(rj, ri));
    }
  }
  return out;
}

RealField project_parity(const RealField& f, int p1, int p2) {
  if (std::abs(p1) != 1 || std::abs(p2) != 1) {
    throw PreconditionError("project_parity: parities must be +1 or -1");
  }
  const int n = f.grid.points();
  RealField out(f.grid);
  for (int i = 0; i < n; ++i) {
    const int ri = (n - i) % n;
    for (int j = 0; j < n; ++j) {
      const int rj = (n - j) % n;
      out(i, j) = 0.25 * (f(i, j) + p1 * f(ri, j) + p2 * f(i, rj) + p1 * p2 * f(ri, rj));
    }
  }
  return out;
}

double parity_defect(const RealField& f, int axis, int parity) {
  const double nf = l2_norm(f);
  if (nf == 0.0) return 0.0;
  RealField r = reflect(f, axis);
  return l2_norm(f - static_cast<double>(parity) * r) / nf;
}

namespace {
template <class F>
double edge_ratio_impl(const F& f, int cells) {
  const int n = f.grid.points();
  if (cells < 1 || 2 * cells >= n) throw PreconditionError("edge_ratio: bad cell count");
  double peak = 0.0, edge = 0.0;
  for (int i = 0; i < n; ++i) {
    const bool ei = i < cells || i >= n - cells;
    for (int j = 0; j < n; ++j) {
      const double v = std::abs(f(i, j));
      peak = std::max(peak, v);
      if (ei || j < cells || j >= n - cells) edge = std::max(edge, v);
    }
  }
  return peak == 0.0 ? 0.0 : edge / peak;
}
}  // namespace

double edge_ratio(const RealField& f, int cells) { return edge_ratio_impl(f, cells); }
double edge_ratio(const ComplexField& f, int cells) { return edge_ratio_impl(f, cells); }

void require_edge_decay(const ComplexField& f, double tol, int cells) {
  const double r = edge_ratio(f, cells);
  if (r > tol) {
    throw PreconditionError("field does not decay near the box edge (ratio " +
                            std::to_string(r) + ")");
  }
}

const std::vector<double>& abs_wavenumbers(const Grid2D& g) {
  thread_local std::map<std::pair<double, int>, std::vector<double>> cache;
  const auto key = std::make_pair(g.half_width(), g.points());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const int n = g.points();
  std::vector<double> k(g.size());
  for (int m1 = 0; m1 < n; ++m1) {
    for (int m2 = 0; m2 < n; ++m2) {
      k[static_cast<std::size_t>(m1) * n + m2] = std::hypot(g.wavenumber(m1), g.wavenumber(m2));
    }
  }
  return cache.emplace(key, std::move(k)).first->second;
}

}  // namespace halfwave
