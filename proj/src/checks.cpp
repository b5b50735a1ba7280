#include "halfwave/checks.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "halfwave/evolve.hpp"
#include "halfwave/linops.hpp"
#include "halfwave/spectral.hpp"

namespace halfwave {

namespace {

Check make_check(const std::string& name, double value, const char* rel, double lo, double hi,
                 bool pass) {
  return Check{name, value, rel, lo, hi, pass};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

void CheckTable::at_most(const std::string& name, double value, double bound) {
  rows_.push_back(make_check(name, value, "<=", bound, bound, value <= bound));
}

void CheckTable::at_least(const std::string& name, double value, double bound) {
  rows_.push_back(make_check(name, value, ">=", bound, bound, value >= bound));
}

void CheckTable::within(const std::string& name, double value, double lo, double hi) {
  rows_.push_back(make_check(name, value, "in", lo, hi, value >= lo && value <= hi));
}

void CheckTable::holds(const std::string& name, bool ok, double value) {
  rows_.push_back(make_check(name, value, "holds", 0.0, 0.0, ok));
}

void CheckTable::merge(const CheckTable& other) {
  rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

bool CheckTable::passed() const {
  if (rows_.empty()) return false;
  for (const auto& c : rows_) {
    if (!c.pass) return false;
  }
  return true;
}

nlohmann::json CheckTable::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : rows_) {
    nlohmann::json r{{"name", c.name}, {"relation", c.relation}, {"pass", c.pass}};
    r["value"] = std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(nullptr);
    if (c.relation == "in") {
      r["bound"] = {c.lo, c.hi};
    } else if (c.relation != "holds") {
      r["bound"] = c.lo;
    }
    rows.push_back(r);
  }
  return {{"title", title_}, {"pass", passed()}, {"checks", rows}};
}

void CheckTable::print(std::ostream& os) const {
  for (const auto& c : rows_) {
    os << "  [" << (c.pass ? "pass" : "FAIL") << "] " << c.name;
    if (c.relation == "holds") {
      if (std::isfinite(c.value)) os << " (" << fmt(c.value) << ")";
    } else if (c.relation == "in") {
      os << ": " << fmt(c.value) << " in [" << fmt(c.lo) << ", " << fmt(c.hi) << "]";
    } else {
      os << ": " << fmt(c.value) << " " << c.relation << " " << fmt(c.lo);
    }
    os << "\n";
  }
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("loglog_slope: need 2+ points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

KernelDefects kernel_defects(const GroundState& gs) {
  KernelDefects d;
  d.minus = l2_norm(apply_L(Side::minus, gs.Q, gs)) / l2_norm(gs.Q);
  const auto dQ = gradient(gs.Q);
  for (int j = 0; j < 2; ++j) d.plus[j] = l2_norm(apply_L(Side::plus, dQ[j], gs)) / l2_norm(dQ[j]);
  return d;
}

CommutatorDefects commutator_defects(const ProfileSet& ps) {
  const GroundState& gs = ps.gs;
  const RealField& Q = gs.Q;
  const RealField LQ = lambda_op(Q);
  CommutatorDefects d;
  {
    const RealField lhs = apply_L(Side::minus, lambda_op(ps.S10), gs);
    const RealField rhs = -1.0 * ps.S10 + LQ + hadamard(LQ, ps.S10) + lambda_op(Q, 2);
    d.s10 = l2_norm(lhs - rhs) / l2_norm(lhs);
  }
  const auto dQ = gradient(Q);
  for (int j = 0; j < 2; ++j) {
    const RealField& S = ps.S01[j];
    const RealField lhs = apply_L(Side::minus, lambda_op(S), gs);
    const RealField rhs = -1.0 * S - dQ[j] + hadamard(LQ, S) - lambda_op(dQ[j]);
    d.s01[j] = l2_norm(lhs - rhs) / l2_norm(lhs);
  }
  return d;
}

namespace {

Scan finish(Scan s) {
  std::vector<double> x, y;
  for (const auto& r : s.rows) {
    x.push_back(r.x);
    y.push_back(r.value);
  }
  s.slope = loglog_slope(x, y);
  return s;
}

}  // namespace

Scan residual_scan_a(const ProfileSet& ps, const std::vector<double>& a) {
  Scan s;
  for (double v : a) s.rows.push_back({v, profile_residual(ps, ProfileParams{v, {0.0, 0.0}}).l2_norm});
  return finish(s);
}

Scan residual_scan_b(const ProfileSet& ps, const std::vector<double>& b) {
  Scan s;
  for (double v : b) s.rows.push_back({v, profile_residual(ps, ProfileParams{0.0, {v, 0.0}}).l2_norm});
  return finish(s);
}

ExpansionScans expansion_scans(const ProfileSet& ps, const std::vector<double>& a,
                               const std::vector<double>& b) {
  ExpansionScans out;
  for (double v : a) {
    const ExpansionRecord r = expansion_check(ps, ProfileParams{v, {0.0, 0.0}});
    out.mass.rows.push_back({v, std::abs(r.mass_dev)});
    out.energy.rows.push_back({v, std::abs(r.energy_dev)});
  }
  for (double v : b) {
    const ExpansionRecord r = expansion_check(ps, ProfileParams{0.0, {v, 0.0}});
    out.momentum.rows.push_back({v, std::abs(r.momentum_dev[0])});
  }
  out.mass = finish(out.mass);
  out.energy = finish(out.energy);
  out.momentum = finish(out.momentum);
  return out;
}

RoundTrip decomposition_round_trip(const ModContext& ctx, const ModParams& truth,
                                   const DecomposeOptions& opts) {
  const Grid2D& w = ctx.window();
  const Grid2D phys(w.half_width() * truth.lambda, w.points());
  const ComplexField u = synthesize(ctx, truth, phys);
  ModParams init = truth;
  init.lambda *= 0.99;
  init.alpha = {truth.alpha[0] + 0.01 * truth.lambda, truth.alpha[1] - 0.01 * truth.lambda};
  init.gamma += 0.05;
  init.a *= 0.9;
  init.b = {truth.b[0] * 0.9, truth.b[1] * 1.1};
  RoundTrip rt{truth, decompose(u, ctx, init, opts), {}, 0.0, 0.0};
  const ModParams& p = rt.state.params;
  auto rel = [](double got, double want) { return std::abs(got - want) / std::abs(want); };
  double dg = std::remainder(p.gamma - truth.gamma, 2.0 * std::numbers::pi);
  rt.rel_error = {rel(p.lambda, truth.lambda),
                  rel(p.alpha[0], truth.alpha[0]),
                  rel(p.alpha[1], truth.alpha[1]),
                  std::abs(dg) / std::abs(truth.gamma),
                  rel(p.a, truth.a),
                  rel(p.b[0], truth.b[0]),
                  rel(p.b[1], truth.b[1])};
  for (double e : rt.rel_error) rt.max_rel_error = std::max(rt.max_rel_error, e);
  const double un = l2_norm(u);
  for (double s : rt.state.ortho) rt.ortho_max = std::max(rt.ortho_max, std::abs(s) / un);
  return rt;
}

JacobianMatch jacobian_match(const ModContext& ctx, double h) {
  JacobianMatch m;
  const AffineSampler w{ComplexField(ctx.profiles().gs.Q)};
  m.numeric = sigma_jacobian(w, ModParams{}, ctx, h);
  m.analytic = base_jacobian(ctx);
  double scale = 0.0;
  for (const auto& r : m.analytic) {
    for (double v : r) scale = std::max(scale, std::abs(v));
  }
  for (int r = 0; r < 7; ++r) {
    for (int c = 0; c < 7; ++c) {
      const double a = m.analytic[r][c];
      const double d = std::abs(m.numeric[r][c] - a) / (a != 0.0 ? std::abs(a) : scale);
      if (d > m.max_rel) {
        m.max_rel = d;
        m.worst_row = r;
        m.worst_col = c;
      }
    }
  }
  return m;
}

IntegratorStudy integrator_study(int steps) {
  const Grid2D g = make_grid(8.0, 128);
  const ComplexField u0 = dealias(ComplexField::from_function(g, [](double x, double y) {
    const double e = std::exp(-(x * x + y * y));
    return cplx(1.5 * e, 0.3 * x * e);
  }));
  IntegratorStudy s;
  const ConservedTriple c0 = functionals(u0);
  const double h = 1e-3;

  Stepper fwd(g);
  ComplexField u = fwd.advance(u0, h, steps);
  s.mass_drift = std::abs(functionals(u).mass / c0.mass - 1.0);
  ComplexField back = Stepper(g).advance(u, -h, steps);
  s.reversal_dealiased = l2_norm(back - u0) / l2_norm(u0);

  const StepOptions raw{true, true, false, 2};
  u = Stepper(g, raw).advance(u0, h, steps);
  back = Stepper(g, raw).advance(u, -h, steps);
  s.reversal = l2_norm(back - u0) / l2_norm(u0);

  for (double dt : {4e-2, 2e-2, 1e-2}) {
    const int n = static_cast<int>(std::lround(0.4 / dt));
    const ComplexField w = Stepper(g).advance(u0, dt, n);
    s.dts.push_back(dt);
    s.energy_drift.push_back(std::abs(functionals(w).energy - c0.energy));
  }
  s.energy_order = loglog_slope(s.dts, s.energy_drift);

  const double k1 = 3.0 * std::numbers::pi / 8.0, t = 0.3;
  const ComplexField pw =
      ComplexField::from_function(g, [&](double x, double) { return std::polar(1.0, k1 * x); });
  const ComplexField pw2 = step(pw, t, StepOptions{true, false, true, 2});
  for (int i = 0; i < g.points(); ++i) {
    for (int j = 0; j < g.points(); ++j) {
      s.plane_wave =
          std::max(s.plane_wave, std::abs(pw2(i, j) - std::polar(1.0, k1 * (g.coord(i) - t))));
    }
  }
  return s;
}

CoercivityStudy coercivity_study(const ProfileSet& ps, const EigenOptions& opts) {
  const GroundState& gs = ps.gs;
  CoercivityStudy c;
  const EigenReport p =
      min_rayleigh_quotient(Side::plus, gs, {gs.Q, ps.S10, ps.S01[0], ps.S01[1]}, opts);
  const EigenReport m = min_rayleigh_quotient(Side::minus, gs, {gs.Q}, opts);
  c.plus = p.value;
  c.plus_residual = p.residual;
  c.minus = m.value;
  c.minus_residual = m.residual;
  return c;
}

CheckTable ground_state_table(const GroundState& gs, const GroundState& doubled, double seconds,
                              double tol) {
  CheckTable t("Ground state");
  t.at_most("PDE residual / ||Q|| on " + gs.grid().describe(), gs.residual, tol);
  t.at_most("PDE residual / ||Q|| on " + doubled.grid().describe(), doubled.residual, tol);
  t.at_most("||Q||^2 agreement across doubling", rel_diff(gs.mass_sq, doubled.mass_sq), 1e-4);
  t.at_most("wall seconds", seconds, 120.0);
  return t;
}

CheckTable identity_table(const ProfileSet& ps) {
  CheckTable t("Kernel and identities on " + ps.grid().describe());
  const KernelDefects k = kernel_defects(ps.gs);
  t.at_most("||L- Q|| / ||Q||", k.minus, 1e-7);
  t.at_most("||L+ d1 Q|| / ||d1 Q||", k.plus[0], 1e-7);
  t.at_most("||L+ d2 Q|| / ||d2 Q||", k.plus[1], 1e-7);
  t.at_most(std::string("(S10,S10)+2(T20,Q) relative, form ") + t20_form_name(ps.t20_form),
            ps.t20_defects.at(t20_form_name(ps.t20_form)), 1e-6);
  for (const auto& [order, p] : ps.pairings) t.at_most("solvability pairing " + order, p, 1e-8);
  const CommutatorDefects c = commutator_defects(ps);
  t.at_most("commutator identity for Lambda S10", c.s10, 1e-6);
  t.at_most("commutator identity for Lambda S01,1", c.s01[0], 1e-6);
  t.at_most("commutator identity for Lambda S01,2", c.s01[1], 1e-6);
  return t;
}

CheckTable residual_scan_table(const ProfileSet& ps, const ProfileSet& partner) {
  CheckTable t("Profile residual scaling");
  const Scan a = residual_scan_a(ps), b = residual_scan_b(ps);
  const Scan a2 = residual_scan_a(partner), b2 = residual_scan_b(partner);
  const std::string g = " on " + ps.grid().describe(), g2 = " on " + partner.grid().describe();
  t.at_least("pure-a slope" + g, a.slope, 2.7);
  t.at_least("pure-b slope" + g, b.slope, 2.5);
  t.at_least("pure-a slope" + g2, a2.slope, 2.7);
  t.at_least("pure-b slope" + g2, b2.slope, 2.5);
  t.at_most("pure-a slope change across doubling", std::abs(a.slope - a2.slope), 0.2);
  t.at_most("pure-b slope change across doubling", std::abs(b.slope - b2.slope), 0.2);
  return t;
}

CheckTable expansion_table(const ProfileSet& ps) {
  CheckTable t("Expansions on " + ps.grid().describe());
  const ExpansionScans s = expansion_scans(ps);
  t.at_least("mass deviation slope in a", s.mass.slope, 3.7);
  t.at_least("|E(Q_P) - e1 a^2| slope in a", s.energy.slope, 3.7);
  t.at_least("|P(Q_P) - p1 b| slope in b", s.momentum.slope, 1.8);
  t.holds("e1 > 0", ps.e1 > 0.0, ps.e1);
  t.holds("p1 > 0", ps.p1 > 0.0, ps.p1);
  return t;
}

CheckTable decomposition_table(const ModContext& ctx) {
  CheckTable t("Decomposition on " + ctx.window().describe());
  ModParams truth;
  truth.lambda = 0.125;
  truth.alpha = {0.01, -0.02};
  truth.gamma = 0.7;
  truth.a = 0.1;
  truth.b = {0.004, -0.002};
  const RoundTrip rt = decomposition_round_trip(ctx, truth);
  static const char* names[7] = {"lambda", "alpha1", "alpha2", "gamma", "a", "b1", "b2"};
  for (int k = 0; k < 7; ++k) {
    t.at_most(std::string("round trip ") + names[k] + " relative", rt.rel_error[k], 1e-6);
  }
  t.at_most("max |sigma| / ||u||", rt.ortho_max, 1e-8);
  const JacobianMatch j = jacobian_match(ctx);
  t.at_most("Jacobian vs analytic entries (worst " + std::to_string(j.worst_row + 1) + "," +
                std::to_string(j.worst_col + 1) + ")",
            j.max_rel, 1e-4);
  return t;
}

CheckTable integrator_table(const IntegratorStudy& s) {
  CheckTable t("Integrator");
  t.at_most("relative mass drift over 1000 steps", s.mass_drift, 1e-10);
  t.within("energy drift order in dt", s.energy_order, 1.8, 2.2);
  t.at_most("time reversal round trip", s.reversal, 1e-10);
  t.at_most("plane wave phase error", s.plane_wave, 1e-12);
  return t;
}

CheckTable blowup_table(const FitReport& fit, const BlowupConstants& k, double seconds) {
  CheckTable t("Blowup laws");
  const double bn = std::hypot(k.B0[0], k.B0[1]);
  t.at_least("lambda decrease factor", fit.lambda_decrease, 2.0);
  t.at_most("max |4 A0^2 lambda / t^2 - 1|", fit.lambda_law_max, 0.10);
  t.within("||D^{1/2} u|| exponent in |t|", fit.half_norm_exponent, -1.15, -0.85);
  t.at_most("max |a / lambda^{1/2} - 1/A0|", fit.a_law_max, 0.15 / k.A0);
  t.at_most("max |b / lambda - B0|", fit.b_law_max, 0.15 * bn + 0.02);
  t.at_most("wall seconds", seconds, 1800.0);
  return t;
}

CheckTable ode_consistency_table(const FitReport& fit) {
  CheckTable t("Modulation ODE consistency");
  t.at_most("lambda vs ODE, first half", fit.ode_lambda_dev, 0.10);
  t.at_most("a vs ODE, first half", fit.ode_a_dev, 0.10);
  t.at_most("b vs ODE, first half", fit.ode_b_dev, 0.10);
  t.at_most("max |a_s + a^2/2| / a^2, early window", fit.a_s_law, 0.2);
  return t;
}

CheckTable coercivity_table(const CoercivityStudy& fine, const CoercivityStudy& coarse) {
  CheckTable t("Coercivity");
  t.at_least("min L+ on the constrained complement, fine grid", fine.plus, 1e-4);
  t.at_least("min L- on Q^perp, fine grid", fine.minus, 1e-4);
  t.at_least("min L+ on the constrained complement, partner grid", coarse.plus, 1e-4);
  t.at_least("min L- on Q^perp, partner grid", coarse.minus, 1e-4);
  t.at_most("L+ agreement across doubling", rel_diff(fine.plus, coarse.plus), 0.10);
  t.at_most("L- agreement across doubling", rel_diff(fine.minus, coarse.minus), 0.10);
  return t;
}

}  // namespace halfwave
