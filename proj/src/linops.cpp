#include "halfwave/linops.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "halfwave/krylov.hpp"
#include "halfwave/spectral.hpp"

namespace halfwave {

namespace {

double coupling(Side s) { return s == Side::plus ? 2.0 : 1.0; }

void normalize(RealField& f) {
  const double n = l2_norm(f);
  if (n == 0.0) throw PreconditionError("cannot normalize a zero field");
  f *= 1.0 / n;
}

// Gram-Schmidt (twice) in the plain Euclidean product; drops near-dependent vectors.
std::vector<Vec> orthonormalize(std::vector<Vec> vs) {
  std::vector<Vec> out;
  for (Vec& v : vs) {
    const double n0 = vnorm(v);
    if (n0 == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vec& u : out) vaxpy(-vdot(u, v), u, v);
    }
    const double n = vnorm(v);
    if (n <= 1e-10 * n0) continue;
    for (double& x : v) x /= n;
    out.push_back(std::move(v));
  }
  return out;
}

void project_off(const std::vector<Vec>& basis, Vec& v) {
  for (const Vec& u : basis) vaxpy(-vdot(u, v), u, v);
}

}  // namespace

const char* side_name(Side s) { return s == Side::plus ? "plus" : "minus"; }

KernelBasis kernel_basis(Side side, const GroundState& gs) {
  KernelBasis kb{side, {}};
  if (side == Side::plus) {
    auto [d1, d2] = gradient(gs.Q);
    normalize(d1);
    normalize(d2);
    kb.vectors.push_back(std::move(d1));
    kb.vectors.push_back(std::move(d2));
  } else {
    RealField q = gs.Q;
    normalize(q);
    kb.vectors.push_back(std::move(q));
  }
  return kb;
}

RealField apply_L(Side side, const RealField& f, const GroundState& gs) {
  require_same_grid(f.grid, gs.grid(), "apply_L");
  const double c = coupling(side);
  RealField out = dfrac(f, 1.0);
  const auto& q = gs.Q.values;
  for (std::size_t k = 0; k < out.size(); ++k) out.values[k] += f.values[k] * (1.0 - c * q[k]);
  return out;
}

double kernel_pairing(const RealField& f, const KernelBasis& kb) {
  const double nf = l2_norm(f);
  if (nf == 0.0) return 0.0;
  double worst = 0.0;
  for (const RealField& v : kb.vectors) worst = std::max(worst, std::abs(dot(f, v)) / nf);
  return worst;
}

RealField solve_L(Side side, const RealField& rhs, const GroundState& gs, const SolveOptions& opts,
                  SolveReport* report) {
  const Grid2D& g = gs.grid();
  require_same_grid(rhs.grid, g, "solve_L");
  if (!rhs.all_finite()) throw PreconditionError("solve_L: right-hand side is not finite");
  if (!(opts.tol > 0.0)) throw PreconditionError("solve_L: tol must be positive");

  SolveReport local;
  SolveReport& rep = report ? *report : local;
  rep = SolveReport{};

  const KernelBasis kb = kernel_basis(side, gs);
  rep.pairing = kernel_pairing(rhs, kb);
  if (rep.pairing > opts.solvability_tol) {
    std::ostringstream os;
    os << "solve_L(" << side_name(side) << "): right-hand side pairs with the kernel at "
       << rep.pairing << " relative (limit " << opts.solvability_tol << ")";
    throw SolvabilityError(os.str(), rep.pairing);
  }

  const double bnorm = l2_norm(rhs);
  RealField x(g);
  if (bnorm == 0.0) return x;

  RealField b = rhs;
  if (opts.sector) {
    RealField bp = project_parity(rhs, opts.sector->p1, opts.sector->p2);
    const double off = l2_norm(rhs - bp) / bnorm;
    if (off > 1e-8) {
      throw PreconditionError("solve_L: right-hand side is outside the requested parity sector (" +
                              std::to_string(off) + " relative)");
    }
    b = std::move(bp);
  }

  // L2 kernel (for x) and the kernel of K L K, spanned by (D+1)^{1/2} v.
  std::vector<Vec> l2_kernel, pre_kernel;
  for (const RealField& v : kb.vectors) {
    RealField vs = v;
    RealField pv = shifted_dfrac(v, 0.5);
    if (opts.sector) {
      vs = project_parity(vs, opts.sector->p1, opts.sector->p2);
      pv = project_parity(pv, opts.sector->p1, opts.sector->p2);
      if (l2_norm(vs) < 1e-8) continue;
    }
    l2_kernel.push_back(vs.values);
    pre_kernel.push_back(pv.values);
  }
  l2_kernel = orthonormalize(std::move(l2_kernel));
  pre_kernel = orthonormalize(std::move(pre_kernel));
  project_off(l2_kernel, b.values);

  const double c = coupling(side);
  const auto& q = gs.Q.values;
  LinearMap op = [&](const Vec& in, Vec& out) {
    RealField y(g, in);
    RealField ky = shifted_dfrac(y, -0.5);
    for (std::size_t k = 0; k < ky.size(); ++k) ky.values[k] *= q[k];
    RealField kqk = shifted_dfrac(ky, -0.5);
    for (std::size_t k = 0; k < in.size(); ++k) out[k] = in[k] - c * kqk.values[k];
  };
  InPlaceMap proj = [&](Vec& v) {
    if (opts.sector) {
      RealField f(g, std::move(v));
      v = project_parity(f, opts.sector->p1, opts.sector->p2).values;
    }
    project_off(pre_kernel, v);
  };

  const double target = opts.tol * bnorm;
  double resid = bnorm;
  for (int pass = 0; pass <= opts.max_refinements; ++pass) {
    RealField r = b - (pass == 0 ? RealField(g) : apply_L(side, x, gs));
    if (opts.sector) r = project_parity(r, opts.sector->p1, opts.sector->p2);
    project_off(l2_kernel, r.values);
    resid = l2_norm(r);
    rep.history.push_back(resid / bnorm);
    if (resid <= target) break;
    if (pass == opts.max_refinements) break;
    const RealField kr = shifted_dfrac(r, -0.5);
    const double inner_tol = std::max(0.3 * target / resid, 1e-15);
    KrylovResult kres = minres(op, kr.values, inner_tol, opts.max_iter, proj);
    rep.iterations += kres.iterations;
    rep.refinements = pass + 1;
    x += shifted_dfrac(RealField(g, std::move(kres.x)), -0.5);
    if (opts.sector) x = project_parity(x, opts.sector->p1, opts.sector->p2);
    project_off(l2_kernel, x.values);
  }
  rep.residual = resid / bnorm;
  if (resid > target) {
    std::ostringstream os;
    os << "solve_L(" << side_name(side) << "): stagnated at relative residual " << rep.residual
       << " after " << rep.iterations << " iterations (tol " << opts.tol << ")";
    throw ConvergenceError(os.str(), rep.history);
  }
  return x;
}

EigenReport min_rayleigh_quotient(Side side, const GroundState& gs,
                                  const std::vector<RealField>& constraints,
                                  const EigenOptions& opts) {
  const Grid2D& g = gs.grid();
  const std::size_t n = g.size();
  const int m = std::max(1, opts.block);

  std::vector<Vec> cons;
  for (const RealField& c : constraints) {
    require_same_grid(c.grid, g, "min_rayleigh_quotient");
    cons.push_back(c.values);
  }
  cons = orthonormalize(std::move(cons));

  auto applyA = [&](const Vec& v) { return apply_L(side, RealField(g, v), gs).values; };
  auto precond = [&](const Vec& v) { return shifted_dfrac(RealField(g, v), -1.0).values; };

  // Deterministic smooth start: Gaussians times random low-order polynomials.
  std::mt19937 rng(opts.seed);
  std::normal_distribution<double> nd;
  std::vector<Vec> X;
  for (int b = 0; b < m; ++b) {
    double c[6];
    for (double& v : c) v = nd(rng);
    RealField f = RealField::from_function(g, [&](double x1, double x2) {
      const double p = c[0] + c[1] * x1 + c[2] * x2 + c[3] * x1 * x1 + c[4] * x1 * x2 + c[5] * x2 * x2;
      return p * std::exp(-(x1 * x1 + x2 * x2) / 8.0);
    });
    X.push_back(f.values);
  }

  // Rayleigh-Ritz on span(S): returns coefficient matrix of the m lowest Ritz vectors.
  auto rayleigh_ritz = [&](const std::vector<Vec>& S, const std::vector<Vec>& AS,
                           Eigen::VectorXd& theta) {
    const int k = static_cast<int>(S.size());
    Eigen::MatrixXd G(k, k), H(k, k);
    for (int i = 0; i < k; ++i) {
      for (int j = i; j < k; ++j) {
        G(i, j) = G(j, i) = vdot(S[i], S[j]);
        H(i, j) = H(j, i) = 0.5 * (vdot(S[i], AS[j]) + vdot(AS[i], S[j]));
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ge(G);
    const double gmax = ge.eigenvalues().maxCoeff();
    std::vector<int> keep;
    for (int i = 0; i < k; ++i)
      if (ge.eigenvalues()(i) > 1e-12 * gmax) keep.push_back(i);
    Eigen::MatrixXd B(k, static_cast<int>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
      B.col(static_cast<int>(j)) =
          ge.eigenvectors().col(keep[j]) / std::sqrt(ge.eigenvalues()(keep[j]));
    }
    Eigen::MatrixXd Hr = B.transpose() * H * B;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> he(Hr);
    const int cnt = std::min<int>(m, static_cast<int>(keep.size()));
    theta = he.eigenvalues().head(cnt);
    return Eigen::MatrixXd(B * he.eigenvectors().leftCols(cnt));
  };
  auto combine = [&](const std::vector<Vec>& S, const Eigen::MatrixXd& C, int from, int to) {
    std::vector<Vec> out(C.cols(), Vec(n, 0.0));
    for (int j = 0; j < C.cols(); ++j)
      for (int i = from; i < to; ++i) vaxpy(C(i, j), S[i], out[j]);
    return out;
  };

  for (Vec& x : X) project_off(cons, x);
  X = orthonormalize(std::move(X));
  std::vector<Vec> AX;
  for (const Vec& x : X) AX.push_back(applyA(x));
  std::vector<Vec> P, AP;

  Eigen::VectorXd theta;
  {
    Eigen::MatrixXd C = rayleigh_ritz(X, AX, theta);
    const int k = static_cast<int>(X.size());
    X = combine(X, C, 0, k);
    AX = combine(AX, C, 0, k);
  }

  EigenReport rep{0.0, 0.0, 0, RealField(g)};
  for (int it = 1; it <= opts.max_iter; ++it) {
    const int bx = static_cast<int>(X.size());
    std::vector<Vec> R(bx);
    for (int j = 0; j < bx; ++j) {
      R[j] = AX[j];
      vaxpy(-theta(j), X[j], R[j]);
      project_off(cons, R[j]);
    }
    rep.value = theta(0);
    rep.residual = vnorm(R[0]) / vnorm(X[0]);
    rep.iterations = it;
    if (rep.residual <= opts.residual_tol) break;

    std::vector<Vec> W;
    for (const Vec& r : R) {
      Vec w = precond(r);
      project_off(cons, w);
      W.push_back(std::move(w));
    }
    std::vector<Vec> AW;
    for (const Vec& w : W) AW.push_back(applyA(w));

    std::vector<Vec> S = X, AS = AX;
    S.insert(S.end(), W.begin(), W.end());
    AS.insert(AS.end(), AW.begin(), AW.end());
    S.insert(S.end(), P.begin(), P.end());
    AS.insert(AS.end(), AP.begin(), AP.end());
    // Scale every basis vector to unit length to keep the Gram matrix balanced.
    for (std::size_t i = 0; i < S.size(); ++i) {
      const double s = vnorm(S[i]);
      if (s > 0.0) {
        for (double& v : S[i]) v /= s;
        for (double& v : AS[i]) v /= s;
      }
    }
    Eigen::MatrixXd C = rayleigh_ritz(S, AS, theta);
    const int total = static_cast<int>(S.size());
    std::vector<Vec> Xn = combine(S, C, 0, total), AXn = combine(AS, C, 0, total);
    P = combine(S, C, bx, total);
    AP = combine(AS, C, bx, total);
    X = std::move(Xn);
    AX = std::move(AXn);
    for (std::size_t j = 0; j < X.size(); ++j) {
      const double s = vnorm(X[j]);
      for (double& v : X[j]) v /= s;
      for (double& v : AX[j]) v /= s;
    }
  }
  if (rep.residual > opts.residual_tol) {
    std::ostringstream os;
    os << "min_rayleigh_quotient(" << side_name(side) << "): residual " << rep.residual
       << " after " << rep.iterations << " iterations";
    throw ConvergenceError(os.str());
  }
  rep.vector = RealField(g, X[0]);
  return rep;
}

std::pair<double, double> coercivity_estimate(const GroundState& gs,
                                              const std::vector<RealField>& constraints_plus,
                                              const std::vector<RealField>& constraints_minus,
                                              const EigenOptions& opts) {
  if (constraints_plus.empty() || constraints_minus.empty()) {
    throw PreconditionError("coercivity_estimate: constraint lists must be nonempty");
  }
  const double cp = min_rayleigh_quotient(Side::plus, gs, constraints_plus, opts).value;
  const double cm = min_rayleigh_quotient(Side::minus, gs, constraints_minus, opts).value;
  return {cp, cm};
}

}  // namespace halfwave
