#include "halfwave/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "halfwave/ground_state.hpp"

namespace halfwave {

const char* initial_data_name(InitialData k) {
  return k == InitialData::self_similar ? "self_similar" : "energy_matched";
}

InitialData parse_initial_data(const std::string& s) {
  if (s == "self_similar") return InitialData::self_similar;
  if (s == "energy_matched") return InitialData::energy_matched;
  throw PreconditionError("unknown initial data kind '" + s + "'");
}

void BlowupConfig::validate() const {
  if (!(E0_over_e1 > 0.0)) throw PreconditionError("E0 must be > 0");
  if (!(t_start < 0.0)) throw PreconditionError("t_start must be < 0");
  if (!(L > 0.0) || !(profile_L > 0.0)) throw PreconditionError("box half-widths must be > 0");
  if (!(c > 0.0)) throw PreconditionError("c must be > 0");
  if (order != 2 && order != 4) throw PreconditionError("order must be 2 or 4");
  if (checkpoint_stride < 1) throw PreconditionError("checkpoint_stride must be >= 1");
  if (!(decompose_tol > 0.0) || !(gs_tol > 0.0)) throw PreconditionError("tolerances must be > 0");
  for (double A : J_A_widths) {
    if (!(A > 0.0)) throw PreconditionError("J_A widths must be > 0");
  }
  make_grid(L, N);
  make_grid(profile_L, profile_N);
}

BlowupConstants blowup_constants(const BlowupConfig& cfg, const ProfileSet& ps) {
  BlowupConstants k;
  k.e1 = ps.e1;
  k.p1 = ps.p1;
  k.E0 = cfg.E0_over_e1 * ps.e1;
  k.A0 = std::sqrt(k.e1 / k.E0);
  for (int j = 0; j < 2; ++j) {
    k.P0[j] = cfg.P0_over_p1[j] * ps.p1;
    k.B0[j] = cfg.P0_over_p1[j];
  }
  k.gamma0 = cfg.gamma0;
  k.x0 = cfg.x0;
  return k;
}

ModParams self_similar_params(const BlowupConstants& k, double t) {
  const double A2 = k.A0 * k.A0;
  ModParams m;
  m.lambda = t * t / (4.0 * A2);
  m.a = -t / (2.0 * A2);
  m.b = {k.B0[0] * m.lambda, k.B0[1] * m.lambda};
  m.alpha = k.x0;
  m.gamma = k.gamma0 - 4.0 * A2 / t;
  return m;
}

Grid2D physical_grid(const BlowupConfig& cfg) { return make_grid(cfg.L, cfg.N); }

ModContext build_context(const BlowupConfig& cfg) {
  const GroundState gs = solve_ground_state(make_grid(cfg.profile_L, cfg.profile_N), cfg.gs_tol);
  return ModContext(build_profile_set(gs));
}

InitialState make_initial_data(const BlowupConfig& cfg, const ModContext& ctx) {
  cfg.validate();
  const Grid2D g = physical_grid(cfg);
  const BlowupConstants k = blowup_constants(cfg, ctx.profiles());
  ModParams m = self_similar_params(k, cfg.t_start);
  if (m.lambda < 16.0 * g.spacing()) {
    std::ostringstream os;
    os << "initial lambda " << m.lambda << " is below 16 dx = " << 16.0 * g.spacing()
       << "; use a larger |t_start| or a finer grid";
    throw PreconditionError(os.str());
  }
  ComplexField u = synthesize(ctx, m, g);
  if (cfg.initial == InitialData::energy_matched) {
    auto defect = [&](double a) {
      ModParams trial = m;
      trial.a = a;
      u = synthesize(ctx, trial, g);
      return functionals(u).energy / k.E0 - 1.0;
    };
    double a0 = m.a, a1 = 1.02 * m.a;
    double f0 = defect(a0), f1 = defect(a1);
    for (int it = 0; it < 30 && std::abs(f1) > 1e-13; ++it) {
      if (f1 == f0) break;
      const double a2 = a1 - f1 * (a1 - a0) / (f1 - f0);
      a0 = a1;
      f0 = f1;
      a1 = a2;
      f1 = defect(a1);
    }
    if (std::abs(f1) > 1e-8) {
      throw ConvergenceError("make_initial_data: energy matching did not converge", {f1});
    }
    m.a = a1;
  }
  return InitialState{std::move(u), m, k};
}

double lambda_floor(const BlowupConfig& cfg) {
  const double dx = 2.0 * cfg.L / cfg.N, dxp = 2.0 * cfg.profile_L / cfg.profile_N;
  const double resample = 1.05 * 0.5 * dx / dxp;
  return std::max(cfg.lambda_min > 0.0 ? cfg.lambda_min : 8.0 * dx, resample);
}

double phi_prime(double r) {
  r = std::abs(r);
  if (r <= 1.0) return r;
  if (r >= 2.0) return 3.0 - std::exp(-r);
  const double u = r - 1.0, u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
  const double e = std::exp(-2.0);
  const double p0 = 1.0, d0 = 1.0, s0 = 0.0, p1 = 3.0 - e, d1 = e, s1 = -e;
  return p0 * (1 - 10 * u3 + 15 * u4 - 6 * u5) + d0 * (u - 6 * u3 + 8 * u4 - 3 * u5) +
         s0 * (0.5 * u2 - 1.5 * u3 + 1.5 * u4 - 0.5 * u5) + p1 * (10 * u3 - 15 * u4 + 6 * u5) +
         d1 * (-4 * u3 + 7 * u4 - 3 * u5) + s1 * (0.5 * u3 - u4 + 0.5 * u5);
}

double phi_second(double r) {
  r = std::abs(r);
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return std::exp(-r);
  const double u = r - 1.0, u2 = u * u, u3 = u2 * u, u4 = u3 * u;
  const double e = std::exp(-2.0);
  const double p0 = 1.0, d0 = 1.0, s0 = 0.0, p1 = 3.0 - e, d1 = e, s1 = -e;
  return p0 * (-30 * u2 + 60 * u3 - 30 * u4) + d0 * (1 - 18 * u2 + 32 * u3 - 15 * u4) +
         s0 * (u - 4.5 * u2 + 6 * u3 - 2.5 * u4) + p1 * (30 * u2 - 60 * u3 + 30 * u4) +
         d1 * (-12 * u2 + 28 * u3 - 15 * u4) + s1 * (1.5 * u2 - 4 * u3 + 2.5 * u4);
}

double phi_convexity_margin(int samples, double r_max) {
  double m = std::numeric_limits<double>::infinity();
  for (int k = 1; k < samples; ++k) m = std::min(m, phi_second(r_max * k / samples));
  return m;
}

double evaluate_J_A(const ComplexField& eps, const ModParams& m, const ModContext& ctx, double A) {
  if (!(A > 0.0)) throw PreconditionError("evaluate_J_A: A must be > 0");
  require_same_grid(eps.grid, ctx.window(), "evaluate_J_A");
  const Grid2D& g = eps.grid;
  const ComplexField QP = ctx.profile(m.profile());
  const double hd = half_derivative_norm(eps);
  const double l2 = l2_norm(eps);
  double pot = 0.0;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const cplx q = QP.values[k], e = eps.values[k];
    const double aq = std::abs(q);
    pot += (std::pow(std::abs(q + e), 3) - aq * aq * aq) / 3.0 - aq * (std::conj(q) * e).real();
  }
  pot *= g.cell_area();
  double vir = 0.0;
  if (m.a != 0.0) {
    const ComplexField g1 = gradient(eps, 0), g2 = gradient(eps, 1);
    const int n = g.points();
    for (int i = 0; i < n; ++i) {
      const double y1 = g.coord(i);
      for (int j = 0; j < n; ++j) {
        const double y2 = g.coord(j), r = std::hypot(y1, y2);
        if (r == 0.0) continue;
        const double w = A * phi_prime(r / A) / r;
        const std::size_t k = eps.index(i, j);
        vir += ((w * y1 * g1.values[k] + w * y2 * g2.values[k]) * std::conj(eps.values[k])).imag();
      }
    }
    vir *= g.cell_area();
  }
  return (0.5 * hd * hd + 0.5 * l2 * l2 - pot + 0.5 * m.a * vir) / m.lambda;
}

BlowupSeries run_blowup(const BlowupConfig& cfg, const ModContext& ctx,
                        const std::vector<Observer>& observers) {
  const auto t0 = std::chrono::steady_clock::now();
  InitialState init = make_initial_data(cfg, ctx);
  BlowupSeries series;
  series.constants = init.constants;
  series.lambda_floor = lambda_floor(cfg);
  series.J_A_widths = cfg.J_A_widths;

  DecomposeOptions dopt;
  dopt.tol = cfg.decompose_tol;
  ModParams guess = init.params;
  std::optional<ModState> last;

  Decomposer decomposer = [&](const Sample& smp) {
    if (last) {
      // Extrapolate the warm start along the self-similar flow.
      const double dt = smp.t - series.rows.back().t;
      guess = last->params;
      guess.lambda -= guess.a * dt;
      guess.gamma += dt / guess.lambda;
      for (int j = 0; j < 2; ++j) guess.alpha[j] += guess.b[j] * dt;
      dopt.jacobian = last->jacobian;
    }
    try {
      last = decompose(smp.u, ctx, guess, dopt);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "decomposition failed at t = " << smp.t << ": " << e.what();
      series.halt_reason = os.str();
      series.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      throw BlowupError(os.str(), series);
    }
    return last->params;
  };

  std::vector<Observer> obs;
  obs.push_back([&](const Sample& smp, const TrajectoryRow& tr) {
    const ModState& st = *last;
    SeriesRow row;
    row.t = smp.t;
    row.step = smp.step;
    row.params = st.params;
    row.eps_l2 = l2_norm(st.eps);
    const double hd = half_derivative_norm(st.eps);
    row.eps_h_half_sq = hd * hd / st.params.lambda + row.eps_l2 * row.eps_l2;
    row.half_norm = tr.half_norm;
    row.conserved = ConservedTriple{tr.mass, tr.energy, tr.momentum};
    for (double A : cfg.J_A_widths) row.J_A.push_back(evaluate_J_A(st.eps, st.params, ctx, A));
    row.newton_iterations = st.iterations;
    series.rows.push_back(std::move(row));
  });
  obs.insert(obs.end(), observers.begin(), observers.end());

  Schedule sc;
  sc.t_start = cfg.t_start;
  sc.t_end = 0.0;
  sc.policy = DtPolicy::adaptive;
  sc.c = cfg.c;
  sc.checkpoint_stride = cfg.checkpoint_stride;
  sc.lambda_min = series.lambda_floor;
  sc.max_steps = cfg.max_steps;
  StepOptions so;
  so.order = cfg.order;
  const RunResult res = run(init.u, sc, obs, decomposer, so);
  series.halt_reason = res.halt_reason;
  series.steps = res.steps;
  series.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return series;
}

BlowupSeries run_blowup(const BlowupConfig& cfg) {
  cfg.validate();
  const ModContext ctx = build_context(cfg);
  return run_blowup(cfg, ctx);
}

std::vector<OdeRow> self_similar_ode_reference(const std::vector<double>& t_grid,
                                               const ModParams& init, double tol) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 8>;  // lambda, a, b1, b2, alpha1, alpha2, gamma, s
  if (t_grid.size() < 2) throw PreconditionError("ode reference: need at least 2 times");
  const double dir = t_grid.back() > t_grid.front() ? 1.0 : -1.0;
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    if (!((t_grid[k] - t_grid[k - 1]) * dir > 0.0)) {
      throw PreconditionError("ode reference: times must be strictly monotone");
    }
  }
  auto rhs = [](const State& x, State& dx, double) {
    const double lam = x[0], a = x[1];
    dx[0] = -a;
    dx[1] = -0.5 * a * a / lam;
    dx[2] = -a * x[2] / lam;
    dx[3] = -a * x[3] / lam;
    dx[4] = x[2];
    dx[5] = x[3];
    dx[6] = 1.0 / lam;
    dx[7] = 1.0 / lam;
  };
  State x{init.lambda, init.a, init.b[0], init.b[1], init.alpha[0], init.alpha[1], init.gamma, 0.0};
  std::vector<OdeRow> out;
  auto record = [&](const State& s, double t) {
    OdeRow r;
    r.t = t;
    r.s = s[7];
    r.params.lambda = s[0];
    r.params.a = s[1];
    r.params.b = {s[2], s[3]};
    r.params.alpha = {s[4], s[5]};
    r.params.gamma = s[6];
    out.push_back(r);
  };
  auto stepper = ode::make_dense_output(tol, tol, ode::runge_kutta_dopri5<State>());
  const double dt0 = dir * 1e-3 * std::abs(t_grid[1] - t_grid[0]);
  ode::integrate_times(stepper, rhs, x, t_grid.begin(), t_grid.end(), dt0, record);
  return out;
}

namespace {

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

FitReport fit_blowup_laws(const BlowupSeries& series, const FitOptions& opts) {
  std::vector<SeriesRow> rows;
  if (series.rows.empty()) throw PreconditionError("fit_blowup_laws: empty series");
  const double cut = series.rows.front().params.lambda * (1.0 - opts.skip_transient);
  for (const auto& r : series.rows) {
    if (r.params.lambda <= cut) rows.push_back(r);
  }
  if (rows.size() < 4) throw PreconditionError("fit_blowup_laws: fewer than 4 rows in the window");
  const BlowupConstants& k = series.constants;
  const double A2 = k.A0 * k.A0;
  FitReport f;
  f.t_first = rows.front().t;
  f.t_last = rows.back().t;
  f.lambda_decrease = rows.front().params.lambda / rows.back().params.lambda;
  if (f.lambda_decrease < opts.min_decrease) {
    std::ostringstream os;
    os << "fit_blowup_laws: lambda decreases only by " << f.lambda_decrease << " (need "
       << opts.min_decrease << ")";
    throw PreconditionError(os.str());
  }
  double num = 0, den = 0;
  std::vector<double> lt, lh;
  const double g_first = rows.front().params.gamma + 4.0 * A2 / rows.front().t - k.gamma0;
  f.lambda_monotone = f.half_norm_monotone = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const ModParams& p = r.params;
    const double t2 = r.t * r.t;
    f.lambda_law_max = std::max(f.lambda_law_max, std::abs(4.0 * A2 * p.lambda / t2 - 1.0));
    num += p.lambda * t2;
    den += t2 * t2;
    lt.push_back(std::log(std::abs(r.t)));
    lh.push_back(std::log(r.half_norm));
    f.a_law_max = std::max(f.a_law_max, std::abs(p.a / std::sqrt(p.lambda) - 1.0 / k.A0));
    f.b_law_max = std::max(
        f.b_law_max, std::hypot(p.b[0] / p.lambda - k.B0[0], p.b[1] / p.lambda - k.B0[1]));
    f.gamma_drift = std::max(
        f.gamma_drift, std::abs(p.gamma + 4.0 * A2 / r.t - k.gamma0 - g_first));
    if (i > 0) {
      f.lambda_monotone = f.lambda_monotone && p.lambda < rows[i - 1].params.lambda;
      f.half_norm_monotone = f.half_norm_monotone && r.half_norm > rows[i - 1].half_norm;
    }
  }
  f.lambda_star = num / den;
  f.lambda_star_dev = 4.0 * A2 * f.lambda_star - 1.0;
  f.half_norm_exponent = slope(lt, lh);

  const std::size_t half = std::max<std::size_t>(3, rows.size() / 2 + 1);
  std::vector<double> tg;
  std::vector<TimedMod> tm;
  for (std::size_t i = 0; i < half && i < rows.size(); ++i) {
    tg.push_back(rows[i].t);
    tm.push_back(TimedMod{rows[i].t, rows[i].params, rows[i].eps_l2});
  }
  const auto ref = self_similar_ode_reference(tg, rows.front().params);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const ModParams &p = rows[i].params, &q = ref[i].params;
    f.ode_lambda_dev = std::max(f.ode_lambda_dev, std::abs(p.lambda / q.lambda - 1.0));
    f.ode_a_dev = std::max(f.ode_a_dev, std::abs(p.a / q.a - 1.0));
    const double bq = std::hypot(q.b[0], q.b[1]);
    const double db = std::hypot(p.b[0] - q.b[0], p.b[1] - q.b[1]);
    f.ode_b_dev = std::max(f.ode_b_dev, bq > 1e-14 ? db / bq : db);
  }
  const auto diag = mod_diagnostics(tm);
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const double a = tm[i].params.a;
    f.a_s_law = std::max(f.a_s_law, std::abs(diag[i].a_law) / (a * a));
  }

  const ConservedTriple& c0 = series.rows.front().conserved;
  const double pn = std::hypot(c0.momentum[0], c0.momentum[1]);
  f.J_A_ratio_min = std::numeric_limits<double>::infinity();
  f.eps_lambda_ratio = 0.0;
  for (const auto& r : series.rows) {
    const ConservedTriple& c = r.conserved;
    f.mass_drift = std::max(f.mass_drift, std::abs(c.mass / c0.mass - 1.0));
    f.energy_drift = std::max(f.energy_drift, std::abs(c.energy / c0.energy - 1.0));
    f.momentum_drift = std::max(
        f.momentum_drift,
        std::hypot(c.momentum[0] - c0.momentum[0], c.momentum[1] - c0.momentum[1]) /
            (pn > 1e-8 ? pn : 1.0));
    const double lam = r.params.lambda;
    for (double j : r.J_A) {
      f.J_A_ratio_min = std::min(f.J_A_ratio_min, j / (r.eps_h_half_sq + lam * lam));
    }
    f.eps_lambda_ratio = std::max(f.eps_lambda_ratio, r.eps_h_half_sq / lam);
  }
  f.energy_target_dev = c0.energy / k.E0 - 1.0;
  return f;
}

nlohmann::json to_json(const ModParams& m) {
  return {{"lambda", m.lambda}, {"alpha", m.alpha}, {"gamma", m.gamma}, {"a", m.a}, {"b", m.b}};
}

nlohmann::json to_json(const BlowupConstants& k) {
  return {{"e1", k.e1}, {"p1", k.p1},     {"E0", k.E0},         {"P0", k.P0},
          {"A0", k.A0}, {"B0", k.B0},     {"gamma0", k.gamma0}, {"x0", k.x0}};
}

nlohmann::json to_json(const FitReport& r) {
  return {{"lambda_decrease", r.lambda_decrease},
          {"t_first", r.t_first},
          {"t_last", r.t_last},
          {"lambda_law_max", r.lambda_law_max},
          {"lambda_star", r.lambda_star},
          {"lambda_star_dev", r.lambda_star_dev},
          {"half_norm_exponent", r.half_norm_exponent},
          {"a_law_max", r.a_law_max},
          {"b_law_max", r.b_law_max},
          {"gamma_drift", r.gamma_drift},
          {"ode_lambda_dev", r.ode_lambda_dev},
          {"ode_a_dev", r.ode_a_dev},
          {"ode_b_dev", r.ode_b_dev},
          {"a_s_law", r.a_s_law},
          {"mass_drift", r.mass_drift},
          {"energy_drift", r.energy_drift},
          {"momentum_drift", r.momentum_drift},
          {"energy_target_dev", r.energy_target_dev},
          {"J_A_ratio_min", r.J_A_ratio_min},
          {"eps_lambda_ratio", r.eps_lambda_ratio},
          {"lambda_monotone", r.lambda_monotone},
          {"half_norm_monotone", r.half_norm_monotone}};
}

void write_series_csv(const std::string& path, const BlowupSeries& s) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "t,lambda,alpha1,alpha2,gamma,a,b1,b2,eps_l2,eps_h_half_sq,half_norm,M,E,P1,P2,"
        "law_lambda";
  for (double A : s.J_A_widths) os << ",J_A_" << A;
  os << "\n";
  const double A2 = s.constants.A0 * s.constants.A0;
  char buf[64];
  for (const auto& r : s.rows) {
    const ModParams& p = r.params;
    const double vals[] = {r.t,       p.lambda,   p.alpha[0],    p.alpha[1],
                           p.gamma,   p.a,        p.b[0],        p.b[1],
                           r.eps_l2,  r.eps_h_half_sq, r.half_norm, r.conserved.mass,
                           r.conserved.energy, r.conserved.momentum[0],
                           r.conserved.momentum[1], 4.0 * A2 * p.lambda / (r.t * r.t) - 1.0};
    bool first = true;
    for (double v : vals) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << (first ? "" : ",") << buf;
      first = false;
    }
    for (double j : r.J_A) {
      std::snprintf(buf, sizeof buf, ",%.17g", j);
      os << buf;
    }
    os << "\n";
  }
}

}  // namespace halfwave
