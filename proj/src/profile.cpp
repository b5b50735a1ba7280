#include "halfwave/profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "halfwave/spectral.hpp"

namespace halfwave {

namespace {

const char* axis_tag(int j) { return j == 0 ? "1" : "2"; }

RealField solve_order(Side side, const RealField& rhs, ProfileSet& ps, const std::string& order,
                      Parity sector, const ProfileBuildOptions& opts) {
  const KernelBasis kb = kernel_basis(side, ps.gs);
  ps.pairings[order] = kernel_pairing(rhs, kb);
  SolveOptions so;
  so.tol = opts.tol;
  so.solvability_tol = opts.solvability_tol;
  if (opts.use_parity_sectors) so.sector = sector;
  SolveReport rep;
  try {
    RealField x = solve_L(side, rhs, ps.gs, so, &rep);
    ps.solve_residuals[order] = rep.residual;
    return x;
  } catch (const SolvabilityError& e) {
    throw SolvabilityError("order " + order + ": " + e.what(), e.pairing());
  } catch (const PreconditionError& e) {
    throw PreconditionError("order " + order + ": " + e.what());
  }
}

}  // namespace

double ProfileParams::b_norm() const { return std::hypot(b[0], b[1]); }

void check_gate(const ProfileParams& P, double gate) {
  if (!std::isfinite(P.a) || !std::isfinite(P.b[0]) || !std::isfinite(P.b[1])) {
    throw PreconditionError("profile parameters must be finite");
  }
  if (P.size() > gate) {
    std::ostringstream os;
    os << "profile parameters outside the smallness gate: a^2+|b| = " << P.size() << " > "
       << gate;
    throw PreconditionError(os.str());
  }
}

const char* t20_form_name(T20Form f) {
  return f == T20Form::scaling_minus ? "1/2 S10 - Lambda S10 + 1/2 S10^2"
                                     : "1/2 S10 + Lambda S10 - 1/2 S10^2";
}

RealField divide_by_profile(const RealField& f, const RealField& Q, double floor,
                            double* masked_fraction) {
  require_same_grid(f.grid, Q.grid, "divide_by_profile");
  const double cut = floor * Q.max_abs();
  RealField out(f.grid), masked(f.grid);
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (Q.values[k] > cut) {
      out.values[k] = f.values[k] / Q.values[k];
    } else {
      masked.values[k] = f.values[k];
    }
  }
  if (masked_fraction) {
    const double nf = l2_norm(f);
    *masked_fraction = nf == 0.0 ? 0.0 : l2_norm(masked) / nf;
  }
  return out;
}

ProfileSet build_profile_set(const GroundState& gs, const ProfileBuildOptions& opts) {
  const Grid2D& g = gs.grid();
  ProfileSet ps{gs,
                RealField(g),
                {RealField(g), RealField(g)},
                RealField(g),
                {RealField(g), RealField(g)},
                {RealField(g), RealField(g)},
                {RealField(g), RealField(g)},
                0.0,
                0.0,
                {0.0, 0.0},
                T20Form::scaling_minus,
                {},
                {},
                {},
                0.0};
  const RealField& Q = gs.Q;
  const Parity even{1, 1};

  const RealField LQ = lambda_op(Q);
  ps.S10 = solve_order(Side::minus, LQ, ps, "S10", even, opts);
  const auto dQ = gradient(Q);
  for (int j = 0; j < 2; ++j) {
    ps.S01[j] = solve_order(Side::minus, -1.0 * dQ[j], ps, std::string("S01,") + axis_tag(j),
                            odd_along(j), opts);
  }

  // O(a^2): both stated forms, keep the one satisfying <S10,S10> = -2<T20,Q>.
  const RealField S = ps.S10;
  const RealField LS = lambda_op(S);
  const RealField S2 = hadamard(S, S);
  const RealField rhs_minus = 0.5 * S - LS + 0.5 * S2;
  const RealField rhs_plus = 0.5 * S + LS - 0.5 * S2;
  const double ss = dot(S, S);
  const RealField T_minus = solve_order(Side::plus, rhs_minus, ps, "T20", even, opts);
  const double d_minus = std::abs(ss + 2.0 * dot(T_minus, Q)) / ss;
  ProfileSet scratch = ps;
  const RealField T_plus = solve_order(Side::plus, rhs_plus, scratch, "T20", even, opts);
  const double d_plus = std::abs(ss + 2.0 * dot(T_plus, Q)) / ss;
  ps.t20_defects[t20_form_name(T20Form::scaling_minus)] = d_minus;
  ps.t20_defects[t20_form_name(T20Form::scaling_plus)] = d_plus;
  if (d_minus <= d_plus) {
    ps.t20_form = T20Form::scaling_minus;
    ps.T20 = T_minus;
  } else {
    ps.t20_form = T20Form::scaling_plus;
    ps.T20 = T_plus;
    ps.pairings["T20"] = scratch.pairings["T20"];
    ps.solve_residuals["T20"] = scratch.solve_residuals["T20"];
  }

  const auto dS10 = gradient(ps.S10);
  const auto dT20 = gradient(ps.T20);
  for (int j = 0; j < 2; ++j) {
    const std::string tag = axis_tag(j);
    const RealField& S01 = ps.S01[j];
    const RealField rhs11 = S01 - lambda_op(S01) + dS10[j] + hadamard(ps.S10, S01);
    ps.T11[j] = solve_order(Side::plus, rhs11, ps, "T11," + tag, odd_along(j), opts);

    const RealField rhs02 = gradient(S01, j) + 0.5 * hadamard(S01, S01);
    ps.T02[j] = solve_order(Side::plus, rhs02, ps, "T02," + tag, even, opts);

    const RealField& T11 = ps.T11[j];
    double masked = 0.0;
    const RealField cubic =
        divide_by_profile(hadamard(hadamard(ps.S10, ps.S10), S01), Q, opts.q_floor, &masked);
    ps.masked_fraction = std::max(ps.masked_fraction, masked);
    const RealField rhs21 = -1.5 * T11 + lambda_op(T11) - dT20[j] + hadamard(T11, ps.S10) +
                            hadamard(ps.T20, S01) + 1.5 * cubic;
    ps.S21[j] = solve_order(Side::minus, rhs21, ps, "S21," + tag, odd_along(j), opts);
  }

  ps.e1 = 0.5 * dot(LQ, ps.S10);
  for (int j = 0; j < 2; ++j) ps.p1_axis[j] = -2.0 * dot(dQ[j], ps.S01[j]);
  ps.p1 = 0.5 * (ps.p1_axis[0] + ps.p1_axis[1]);
  return ps;
}

ComplexField assemble_profile(const ProfileSet& ps, const ProfileParams& P, double gate) {
  check_gate(P, gate);
  const double a = P.a;
  RealField re = ps.gs.Q;
  RealField im(ps.grid());
  re.axpy(a * a, ps.T20);
  im.axpy(a, ps.S10);
  for (int j = 0; j < 2; ++j) {
    const double b = P.b[j];
    if (b == 0.0) continue;
    re.axpy(a * b, ps.T11[j]);
    re.axpy(b * b, ps.T02[j]);
    im.axpy(b, ps.S01[j]);
    im.axpy(a * a * b, ps.S21[j]);
  }
  return ComplexField(re, im);
}

ComplexField profile_da(const ProfileSet& ps, const ProfileParams& P) {
  const double a = P.a;
  RealField re = 2.0 * a * ps.T20;
  RealField im = ps.S10;
  for (int j = 0; j < 2; ++j) {
    re.axpy(P.b[j], ps.T11[j]);
    im.axpy(2.0 * a * P.b[j], ps.S21[j]);
  }
  return ComplexField(re, im);
}

ComplexField profile_db(const ProfileSet& ps, const ProfileParams& P, int j) {
  if (j != 0 && j != 1) throw PreconditionError("profile_db: axis must be 0 or 1");
  const double a = P.a;
  RealField re = a * ps.T11[j];
  re.axpy(2.0 * P.b[j], ps.T02[j]);
  RealField im = ps.S01[j];
  im.axpy(a * a, ps.S21[j]);
  return ComplexField(re, im);
}

ResidualReport profile_residual(const ProfileSet& ps, const ProfileParams& P, double gate) {
  const ComplexField QP = assemble_profile(ps, P, gate);
  const double a = P.a;
  const cplx I(0.0, 1.0);

  ComplexField lhs = dfrac(QP, 1.0);
  lhs *= -1.0;
  lhs -= QP;
  const ComplexField da = profile_da(ps, P);
  const ComplexField LQP = lambda_op(QP);
  for (std::size_t k = 0; k < lhs.size(); ++k) {
    const cplx v = QP.values[k];
    lhs.values[k] += -I * (0.5 * a * a) * da.values[k] + I * a * LQP.values[k] + std::abs(v) * v;
  }
  for (int j = 0; j < 2; ++j) {
    const double b = P.b[j];
    if (b == 0.0) continue;
    const ComplexField db = profile_db(ps, P, j);
    const ComplexField gj = gradient(QP, j);
    for (std::size_t k = 0; k < lhs.size(); ++k) {
      lhs.values[k] += -I * (a * b) * db.values[k] - I * b * gj.values[k];
    }
  }
  lhs *= -1.0;
  ResidualReport rep{lhs, 0.0, 0.0, P};
  rep.l2_norm = l2_norm(lhs);
  rep.h1_norm = h1_norm(lhs);
  return rep;
}

ExpansionRecord expansion_check(const ProfileSet& ps, const ProfileParams& P, double gate) {
  const ComplexField QP = assemble_profile(ps, P, gate);
  const ConservedTriple c = functionals(QP);
  ExpansionRecord r;
  r.mass_dev = c.mass - ps.gs.mass_sq;
  r.energy_dev = c.energy - ps.e1 * P.a * P.a;
  for (int j = 0; j < 2; ++j) r.momentum_dev[j] = c.momentum[j] - ps.p1 * P.b[j];
  return r;
}

}  // namespace halfwave
