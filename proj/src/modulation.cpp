#include "halfwave/modulation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "halfwave/spectral.hpp"

namespace halfwave {

namespace {

constexpr int kFields = 11;

// Coefficients of the fields in the order of ModContext::derived_.
std::array<double, kFields> profile_coeffs(const ProfileParams& P) {
  const double a = P.a, b1 = P.b[0], b2 = P.b[1];
  return {1.0, a * a, a * b1, a * b2, b1 * b1, b2 * b2, a, b1, b2, a * a * b1, a * a * b2};
}

RealField solve_rho(Side side, const RealField& rhs, const GroundState& gs, Parity sector,
                    const RhoOptions& opts, const char* name) {
  SolveOptions so;
  so.tol = opts.tol;
  so.solvability_tol = opts.solvability_tol;
  so.sector = sector;
  try {
    return solve_L(side, rhs, gs, so);
  } catch (const SolvabilityError& e) {
    throw SolvabilityError(std::string(name) + ": " + e.what(), e.pairing());
  }
}

double q_pairing(const RealField& rhs, const RealField& Q) {
  const double n = l2_norm(rhs) * l2_norm(Q);
  return n == 0.0 ? 0.0 : dot(rhs, Q) / n;
}

double max_abs(const std::array<double, 7>& s) {
  double m = 0.0;
  for (double v : s) m = std::max(m, std::abs(v));
  return m;
}

ModParams shifted(ModParams m, int k, double h) {
  switch (k) {
    case 0: m.lambda += h; break;
    case 1: m.alpha[0] += h; break;
    case 2: m.alpha[1] += h; break;
    case 3: m.gamma += h; break;
    case 4: m.a += h; break;
    case 5: m.b[0] += h; break;
    default: m.b[1] += h; break;
  }
  return m;
}

double step_size(const ModParams& m, int k, double h) { return k < 3 ? h * m.lambda : h; }

// v0 = lambda u(lambda y + alpha) without the phase.
ComplexField sample_window(const AffineSampler& u, const Grid2D& window, double lambda,
                           const std::array<double, 2>& alpha, double rmin, double rmax) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw PreconditionError("renormalize: lambda must be positive");
  }
  const Grid2D& src = u.source_grid();
  const double r = sampling_ratio(src, window, lambda);
  if (r < rmin || r > rmax) {
    std::ostringstream os;
    os << "renormalize: sampling ratio " << r << " outside [" << rmin << ", " << rmax
       << "]; re-grid the window";
    throw PreconditionError(os.str());
  }
  if (lambda * window.half_width() > 1.01 * src.half_width()) {
    std::ostringstream os;
    os << "renormalize: window of half-width " << lambda * window.half_width()
       << " escapes the source box " << src.half_width();
    throw PreconditionError(os.str());
  }
  ComplexField v = u(window, lambda, alpha);
  v *= lambda;
  return v;
}

std::array<double, 7> sigma_at(const ComplexField& v0, double gamma, const ProfileParams& P,
                               const ModContext& ctx) {
  ComplexField eps = v0;
  eps *= std::polar(1.0, -gamma);
  eps -= ctx.profile(P);
  return orthogonality(eps, ctx.test_functions(P));
}

}  // namespace

RhoBasis build_rho_basis(const ProfileSet& ps, const RhoOptions& opts) {
  const GroundState& gs = ps.gs;
  const Parity even{1, 1};
  RealField rho1 = solve_rho(Side::plus, ps.S10, gs, even, opts, "rho_1");
  const RealField rhs_a = hadamard(ps.S10, rho1) + lambda_op(rho1) - 2.0 * ps.T20;
  RhoBasis rb{rho1, RealField(ps.grid()), {RealField(ps.grid()), RealField(ps.grid())}, 0.0,
              {0.0, 0.0}};
  rb.pairing_a = q_pairing(rhs_a, gs.Q);
  rb.rho2a = solve_rho(Side::minus, rhs_a, gs, even, opts, "rho_2 (a)");
  for (int j = 0; j < 2; ++j) {
    const RealField rhs_b = hadamard(ps.S01[j], rho1) - gradient(rho1, j) - ps.T11[j];
    rb.pairing_b[j] = q_pairing(rhs_b, gs.Q);
    rb.rho2b[j] = solve_rho(Side::minus, rhs_b, gs, odd_along(j), opts, "rho_2 (b)");
  }
  return rb;
}

RhoPair rho_at(const RhoBasis& rb, const ProfileParams& P) {
  RhoPair r{rb.rho1, RealField(rb.rho1.grid)};
  r.rho2.axpy(P.a, rb.rho2a);
  for (int j = 0; j < 2; ++j) r.rho2.axpy(P.b[j], rb.rho2b[j]);
  return r;
}

RhoPair build_rho(const ProfileSet& ps, const ProfileParams& P, const RhoOptions& opts) {
  check_gate(P);
  return rho_at(build_rho_basis(ps, opts), P);
}

ModContext::Derived ModContext::derive(const RealField& f) {
  auto g = gradient(f);
  return Derived{lambda_op(f), {std::move(g[0]), std::move(g[1])}};
}

const RealField& ModContext::base(int k) const {
  switch (k) {
    case 0: return ps_.gs.Q;
    case 1: return ps_.T20;
    case 2: return ps_.T11[0];
    case 3: return ps_.T11[1];
    case 4: return ps_.T02[0];
    case 5: return ps_.T02[1];
    case 6: return ps_.S10;
    case 7: return ps_.S01[0];
    case 8: return ps_.S01[1];
    case 9: return ps_.S21[0];
    default: return ps_.S21[1];
  }
}

ModContext::ModContext(ProfileSet ps, const RhoOptions& opts)
    : ps_(std::move(ps)), rho_(build_rho_basis(ps_, opts)) {
  derived_.reserve(kFields);
  for (int k = 0; k < kFields; ++k) derived_.push_back(derive(base(k)));
}

ComplexField ModContext::profile(const ProfileParams& P) const {
  return assemble_profile(ps_, P, 1e300);
}

TestFunctions ModContext::test_functions(const ProfileParams& P) const {
  const auto c = profile_coeffs(P);
  const Grid2D& g = window();
  auto combine = [&](auto pick) {
    RealField re(g), im(g);
    for (int k = 0; k < 6; ++k) {
      if (c[k] != 0.0) re.axpy(c[k], pick(derived_[k]));
    }
    for (int k = 6; k < kFields; ++k) {
      if (c[k] != 0.0) im.axpy(c[k], pick(derived_[k]));
    }
    return ComplexField(re, im);
  };
  TestFunctions tf{combine([](const Derived& d) -> const RealField& { return d.lam; }),
                   profile_da(ps_, P),
                   {combine([](const Derived& d) -> const RealField& { return d.grad[0]; }),
                    combine([](const Derived& d) -> const RealField& { return d.grad[1]; })},
                   {profile_db(ps_, P, 0), profile_db(ps_, P, 1)},
                   rho_at(rho_, P)};
  return tf;
}

ComplexField renormalize(const AffineSampler& u, const Grid2D& window, const ModParams& m,
                         double ratio_min, double ratio_max) {
  ComplexField v = sample_window(u, window, m.lambda, m.alpha, ratio_min, ratio_max);
  v *= std::polar(1.0, -m.gamma);
  return v;
}

ComplexField synthesize(const ModContext& ctx, const ModParams& m, const Grid2D& target) {
  if (!(m.lambda > 0.0)) throw PreconditionError("synthesize: lambda must be positive");
  const Grid2D& pg = ctx.window();
  if (target.half_width() / m.lambda > pg.half_width() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "synthesize: target box maps to half-width " << target.half_width() / m.lambda
       << " beyond the profile box " << pg.half_width();
    throw PreconditionError(os.str());
  }
  const double s = 1.0 / m.lambda;
  ComplexField u =
      sample_affine(ctx.profile(m.profile()), target, s, {-m.alpha[0] * s, -m.alpha[1] * s});
  u *= std::polar(s, m.gamma);
  return u;
}

double skew_pairing(const ComplexField& eps, const ComplexField& f) {
  require_same_grid(eps.grid, f.grid, "skew_pairing");
  double s = 0.0;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    s += eps.values[k].imag() * f.values[k].real() - eps.values[k].real() * f.values[k].imag();
  }
  return s * eps.grid.cell_area();
}

std::array<double, 7> orthogonality(const ComplexField& eps, const TestFunctions& tf) {
  return {skew_pairing(eps, tf.lambda_q),
          skew_pairing(eps, tf.da),
          -skew_pairing(eps, ComplexField(tf.rho.rho1, tf.rho.rho2)),
          skew_pairing(eps, tf.grad[0]),
          skew_pairing(eps, tf.grad[1]),
          skew_pairing(eps, tf.db[0]),
          skew_pairing(eps, tf.db[1])};
}

std::array<double, 7> sigma(const AffineSampler& w, const ModParams& trial,
                            const ModContext& ctx) {
  const ComplexField v0 = sample_window(w, ctx.window(), trial.lambda, trial.alpha, 0.5, 2.0);
  return sigma_at(v0, trial.gamma, trial.profile(), ctx);
}

namespace {

Jacobian7 jacobian_impl(const AffineSampler& w, const ModParams& m, const ModContext& ctx,
                        const ComplexField& v0, double h, double rmin, double rmax) {
  Jacobian7 J{};
  for (int k = 0; k < 7; ++k) {
    const double hk = step_size(m, k, h);
    const ModParams mp = shifted(m, k, hk), mm = shifted(m, k, -hk);
    std::array<double, 7> sp, sm;
    if (k < 3) {
      sp = sigma_at(sample_window(w, ctx.window(), mp.lambda, mp.alpha, rmin, rmax), mp.gamma,
                    mp.profile(), ctx);
      sm = sigma_at(sample_window(w, ctx.window(), mm.lambda, mm.alpha, rmin, rmax), mm.gamma,
                    mm.profile(), ctx);
    } else {
      sp = sigma_at(v0, mp.gamma, mp.profile(), ctx);
      sm = sigma_at(v0, mm.gamma, mm.profile(), ctx);
    }
    for (int r = 0; r < 7; ++r) J[r][k] = (sp[r] - sm[r]) / (2.0 * hk);
  }
  return J;
}

}  // namespace

Jacobian7 sigma_jacobian(const AffineSampler& w, const ModParams& trial, const ModContext& ctx,
                         double h) {
  const ComplexField v0 = sample_window(w, ctx.window(), trial.lambda, trial.alpha, 0.5, 2.0);
  return jacobian_impl(w, trial, ctx, v0, h, 0.5, 2.0);
}

Jacobian7 base_jacobian(const ModContext& ctx) {
  const ProfileSet& ps = ctx.profiles();
  const RealField& Q = ps.gs.Q;
  const RealField LQ = lambda_op(Q);
  Jacobian7 J{};
  J[0][4] = -dot(ps.S10, LQ);
  // lambda column: generator of the sampling dilation
  J[1][0] = -dot(dilation_generator(Q), ps.S10);
  J[2][3] = dot(Q, ctx.rho().rho1);
  J[2][4] = dot(ps.S10, ctx.rho().rho1);
  for (int j = 0; j < 2; ++j) {
    const double c = dot(apply_L(Side::minus, ps.S01[j], ps.gs), ps.S01[j]);
    J[3 + j][5 + j] = c;
    J[5 + j][1 + j] = c;
  }
  return J;
}

ModState decompose(const ComplexField& u, const ModContext& ctx, const ModParams& init,
                   const DecomposeOptions& opts) {
  const AffineSampler w(u);
  const double unorm = l2_norm(u);
  const double target = opts.tol * unorm;
  ModParams m = init;
  ComplexField v0 = sample_window(w, ctx.window(), m.lambda, m.alpha, opts.ratio_min,
                                  opts.ratio_max);
  std::array<double, 7> s = sigma_at(v0, m.gamma, m.profile(), ctx);
  std::vector<double> history{max_abs(s)};
  std::optional<Jacobian7> J = opts.jacobian;
  int it = 0, builds = 0, loops = 0;
  while (max_abs(s) > target) {
    if (loops++ >= opts.max_iter) {
      throw ConvergenceError("decompose: Newton did not converge in " +
                                 std::to_string(opts.max_iter) + " iterations",
                             history);
    }
    const bool fresh = !J;
    if (fresh) {
      J = jacobian_impl(w, m, ctx, v0, opts.fd_step, opts.ratio_min, opts.ratio_max);
      for (auto& row : *J) {
        for (int c = 0; c < 3; ++c) row[c] *= m.lambda;
      }
      ++builds;
    }
    Eigen::Matrix<double, 7, 7> A;
    Eigen::Matrix<double, 7, 1> rhs;
    for (int r = 0; r < 7; ++r) {
      rhs(r) = -s[r];
      for (int c = 0; c < 7; ++c) A(r, c) = (*J)[r][c] / (c < 3 ? m.lambda : 1.0);
    }
    const Eigen::Matrix<double, 7, 1> d = A.fullPivLu().solve(rhs);
    if (!d.allFinite()) {
      if (!fresh) {
        J.reset();
        continue;
      }
      throw ConvergenceError("decompose: singular Jacobian", history);
    }

    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opts.max_halvings; ++h, t *= 0.5) {
      ModParams trial = m;
      for (int k = 0; k < 7; ++k) trial = shifted(trial, k, t * d(k));
      if (!(trial.lambda > 0.0)) continue;
      ComplexField v1 = sample_window(w, ctx.window(), trial.lambda, trial.alpha,
                                      opts.ratio_min, opts.ratio_max);
      const auto s1 = sigma_at(v1, trial.gamma, trial.profile(), ctx);
      if (max_abs(s1) < max_abs(s)) {
        m = trial;
        v0 = std::move(v1);
        s = s1;
        accepted = true;
        break;
      }
      if (!fresh) break;
    }
    if (!accepted) {
      if (!fresh) {
        J.reset();
        continue;
      }
      throw ConvergenceError("decompose: no decrease after step halving", history);
    }
    ++it;
    const double prev = history.back();
    history.push_back(max_abs(s));
    if (!fresh && history.back() > 0.25 * prev) J.reset();
  }
  ComplexField eps = v0;
  eps *= std::polar(1.0, -m.gamma);
  eps -= ctx.profile(m.profile());
  ModState out{m, std::move(eps), s, it, std::move(history), J, builds};
  return out;
}

ModParams cold_start(const ComplexField& u, const ModContext& ctx) {
  const Grid2D& g = u.grid;
  const int n = g.points();
  double mass = 0.0, m1 = 0.0, m2 = 0.0, peak = 0.0;
  cplx at_peak = 1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const cplx v = u(i, j);
      const double d = std::norm(v);
      mass += d;
      m1 += d * g.coord(i);
      m2 += d * g.coord(j);
      if (std::abs(v) > peak) {
        peak = std::abs(v);
        at_peak = v;
      }
    }
  }
  if (peak == 0.0) throw PreconditionError("cold_start: zero field");
  ModParams m;
  m.lambda = ctx.profiles().gs.Q.max_abs() / peak;
  m.alpha = {m1 / mass, m2 / mass};
  m.gamma = std::arg(at_peak);
  return m;
}

RealField apply_M(Side side, const ComplexField& eps, const ProfileSet& ps, const ProfileParams& P,
                  double q_floor) {
  require_same_grid(eps.grid, ps.grid(), "apply_M");
  const ComplexField QP = assemble_profile(ps, P);
  const RealField e1 = eps.real(), e2 = eps.imag();
  const RealField Qm = QP.abs();
  const double cut = q_floor * Qm.max_abs();
  RealField out = side == Side::plus ? e1 : e2;
  out += dfrac(out, 1.0);
  const RealField& own = side == Side::plus ? e1 : e2;
  const RealField& other = side == Side::plus ? e2 : e1;
  const double sgn = side == Side::plus ? -1.0 : 1.0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double q1 = QP.values[k].real(), q2 = QP.values[k].imag(), qa = Qm.values[k];
    out.values[k] -= 1.5 * qa * own.values[k];
    if (qa > cut) {
      out.values[k] += sgn * 0.5 * (q1 * q1 - q2 * q2) / qa * own.values[k];
      out.values[k] -= q1 * q2 / qa * other.values[k];
    }
  }
  return out;
}

std::vector<ModRow> mod_diagnostics(const std::vector<TimedMod>& series) {
  const std::size_t n = series.size();
  if (n < 3) throw PreconditionError("mod_diagnostics: need at least 3 samples");
  for (std::size_t k = 1; k < n; ++k) {
    if (!(series[k].t > series[k - 1].t)) {
      throw PreconditionError("mod_diagnostics: timestamps must increase strictly");
    }
  }
  std::vector<double> s(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    const double dt = series[k].t - series[k - 1].t;
    s[k] = s[k - 1] + 0.5 * dt * (1.0 / series[k].params.lambda + 1.0 / series[k - 1].params.lambda);
  }
  // Second-order three-point derivative in s on a nonuniform grid.
  auto deriv = [&](std::size_t k, auto get) {
    std::size_t i0 = k == 0 ? 0 : (k == n - 1 ? n - 3 : k - 1);
    const double x0 = s[i0], x1 = s[i0 + 1], x2 = s[i0 + 2], x = s[k];
    const double f0 = get(series[i0].params), f1 = get(series[i0 + 1].params),
                 f2 = get(series[i0 + 2].params);
    const double w0 = (2 * x - x1 - x2) / ((x0 - x1) * (x0 - x2));
    const double w1 = (2 * x - x0 - x2) / ((x1 - x0) * (x1 - x2));
    const double w2 = (2 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
    return w0 * f0 + w1 * f1 + w2 * f2;
  };
  std::vector<ModRow> rows;
  rows.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const ModParams& p = series[k].params;
    ModRow r;
    r.t = series[k].t;
    r.s = s[k];
    r.a_law = deriv(k, [](const ModParams& q) { return q.a; }) + 0.5 * p.a * p.a;
    r.gamma_tilde = deriv(k, [](const ModParams& q) { return q.gamma; }) - 1.0;
    r.lambda_law = deriv(k, [](const ModParams& q) { return std::log(q.lambda); }) + p.a;
    for (int j = 0; j < 2; ++j) {
      r.alpha_law[j] = deriv(k, [j](const ModParams& q) { return q.alpha[j]; }) / p.lambda - p.b[j];
      r.b_law[j] = deriv(k, [j](const ModParams& q) { return q.b[j]; }) + p.a * p.b[j];
    }
    const double bb = p.b[0] * p.b[0] + p.b[1] * p.b[1];
    r.bound = p.lambda * p.lambda + std::pow(p.a, 4) + bb + series[k].eps_l2 * series[k].eps_l2;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace halfwave
