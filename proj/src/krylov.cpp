#include "halfwave/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace halfwave {

double vdot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double vnorm(const Vec& a) { return std::sqrt(vdot(a, a)); }

void vaxpy(double s, const Vec& x, Vec& y) {
  for (std::size_t k = 0; k < x.size(); ++k) y[k] += s * x[k];
}

KrylovResult minres(const LinearMap& A, const Vec& b_in, double rtol, int max_iter,
                    const InPlaceMap& project) {
  const std::size_t n = b_in.size();
  KrylovResult res;
  res.x.assign(n, 0.0);

  Vec r1 = b_in;
  if (project) project(r1);
  const double beta1 = vnorm(r1);
  if (beta1 == 0.0) {
    res.converged = true;
    return res;
  }

  Vec r2 = r1, y = r1, v(n), w(n, 0.0), w1(n), w2(n, 0.0);
  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  const double tiny = std::numeric_limits<double>::epsilon();

  for (int itn = 1; itn <= max_iter; ++itn) {
    const double s = 1.0 / beta;
    for (std::size_t k = 0; k < n; ++k) v[k] = s * y[k];
    A(v, y);
    if (project) project(y);
    if (itn >= 2) vaxpy(-beta / oldb, r1, y);
    const double alfa = vdot(v, y);
    vaxpy(-alfa / beta, r2, y);
    std::swap(r1, r2);
    r2 = y;
    oldb = beta;
    beta = vnorm(r2);

    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), tiny);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    std::swap(w1, w2);
    std::swap(w2, w);
    for (std::size_t k = 0; k < n; ++k) w[k] = (v[k] - oldeps * w1[k] - delta * w2[k]) / gamma;
    vaxpy(phi, w, res.x);

    const double rel = phibar / beta1;
    res.history.push_back(rel);
    res.iterations = itn;
    res.relative_residual = rel;
    if (rel <= rtol) {
      res.converged = true;
      break;
    }
    if (beta == 0.0) {
      res.converged = rel <= rtol;
      break;
    }
  }
  return res;
}

}  // namespace halfwave
