#include <cfloat>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fftw3.h>
#include <json.hpp>

#include "halfwave/checks.hpp"
#include "halfwave/evolve.hpp"
#include "halfwave/experiment.hpp"
#include "halfwave/field_io.hpp"
#include "halfwave/ground_state.hpp"
#include "halfwave/modulation.hpp"
#include "halfwave/profile.hpp"
#include "halfwave/run_config.hpp"
#include "halfwave/spectral.hpp"

#ifndef HALFWAVE_VERSION
#define HALFWAVE_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace halfwave;

namespace {

enum ExitCode { kPass = 0, kUsage = 1, kCompute = 2, kVerify = 3 };

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string grid;
  std::string out;
};

RunConfig load_config(const Common& c) {
  RunConfig rc = c.config.empty() ? RunConfig{} : RunConfig::load(c.config);
  if (!c.grid.empty()) {
    std::stringstream ss(c.grid);
    std::string item;
    while (std::getline(ss, item, ',')) rc.assign(item);
  }
  for (const auto& s : c.sets) rc.assign(s);
  return rc;
}

json environment() {
  return {{"compiler", __VERSION__},
          {"cxx_standard", static_cast<long>(__cplusplus)},
          {"fftw", std::string(fftw_version)},
          {"fft_planner", "FFTW_ESTIMATE"},
          {"flt_eval_method", FLT_EVAL_METHOD},
          {"rounding", "to nearest"},
          {"threads", 1}};
}

/// manifest.json beside the outputs, rewritten at start and at exit.
class Manifest {
 public:
  Manifest(const fs::path& dir, std::string sub, json argv)
      : path_(dir / "manifest.json"), t0_(Clock::now()) {
    j_ = {{"tool", "halfwave"},
          {"version", HALFWAVE_VERSION},
          {"subcommand", std::move(sub)},
          {"argv", std::move(argv)},
          {"environment", environment()},
          {"status", "running"},
          {"outputs", json::array()}};
  }

  void begin(const RunConfig& rc) {
    j_["config"] = rc.echo();
    write();
    started_ = true;
  }
  bool started() const { return started_; }
  void grid(const Grid2D& g) { j_["grid"][g.describe()] = {{"L", g.half_width()}, {"N", g.points()}}; }
  void output(const fs::path& p) { j_["outputs"].push_back(p.filename().string()); }
  void note(const std::string& key, json v) { j_[key] = std::move(v); }

  void finish(const std::string& status, const std::string& error = "") {
    j_["status"] = status;
    j_["wall_seconds"] = seconds_since(t0_);
    if (!error.empty()) j_["error"] = error;
    write();
  }

 private:
  void write() const {
    std::ofstream os(path_);
    os << j_.dump(2) << "\n";
  }

  fs::path path_;
  Clock::time_point t0_;
  json j_;
  bool started_ = false;
};

void write_json(const fs::path& p, const json& j, Manifest& m) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << j.dump(2) << "\n";
  m.output(p);
}

json history_json(const std::vector<double>& h) { return json(h); }

json scan_json(const Scan& s) {
  json rows = json::array();
  for (const auto& r : s.rows) rows.push_back({r.x, r.value});
  return {{"rows", rows}, {"slope", s.slope}};
}

/// L, N, gs_tol and max_iter shared by the profile-based commands.
struct GridKeys {
  double L;
  int N;
  double gs_tol;
  int max_iter;
};

GridKeys grid_keys(RunConfig& rc, double L, int N) {
  return {rc.get_double("L", L), rc.get_int("N", N), rc.get_double("gs_tol", 1e-10),
          rc.get_int("max_iter", 2000)};
}

GroundState solve_gs(const GridKeys& k) {
  return solve_ground_state(make_grid(k.L, k.N), k.gs_tol, k.max_iter);
}

int cmd_ground_state(RunConfig& rc, const fs::path& out, Manifest& m) {
  const double L = rc.get_double("L", 64.0);
  const int N = rc.get_int("N", 512);
  const double tol = rc.get_double("tol", 1e-10);
  const int max_iter = rc.get_int("max_iter", 2000);
  rc.require_all_used();
  const Grid2D g = make_grid(L, N);
  m.grid(g);
  m.begin(rc);
  const GroundState gs = solve_ground_state(g, tol, max_iter);
  write_field((out / "Q.hwf").string(), gs.Q, {{"field", "Q"}});
  m.output(out / "Q.hwf");
  write_json(out / "ground_state.json",
             {{"grid", {{"L", L}, {"N", N}}},
              {"residual", gs.residual},
              {"mass_sq", gs.mass_sq},
              {"peak", gs.Q.max_abs()},
              {"iterations", gs.iterations},
              {"multiplier", gs.multiplier},
              {"edge_ratio", edge_ratio(gs.Q)},
              {"history", history_json(gs.history)}},
             m);
  std::printf("||Q||^2 = %.12g, residual %.3e after %d iterations\n", gs.mass_sq, gs.residual,
              gs.iterations);
  return kPass;
}

json profile_report(const ProfileSet& ps, const Scan& a, const Scan& b) {
  return {{"grid", {{"L", ps.grid().half_width()}, {"N", ps.grid().points()}}},
          {"e1", ps.e1},
          {"p1", ps.p1},
          {"p1_axis", ps.p1_axis},
          {"t20_form", t20_form_name(ps.t20_form)},
          {"t20_defects", ps.t20_defects},
          {"pairings", ps.pairings},
          {"solve_residuals", ps.solve_residuals},
          {"masked_fraction", ps.masked_fraction},
          {"residual_scan", {{"a", scan_json(a)}, {"b", scan_json(b)}}}};
}

int cmd_profiles(RunConfig& rc, const fs::path& out, Manifest& m) {
  const GridKeys k = grid_keys(rc, 16.0, 1024);
  ProfileBuildOptions po;
  po.tol = rc.get_double("tol", po.tol);
  po.solvability_tol = rc.get_double("solvability_tol", po.solvability_tol);
  const auto av = rc.get_list("a_values", {1e-2, 5e-3, 2.5e-3});
  const auto bv = rc.get_list("b_values", {1e-3, 5e-4, 2.5e-4});
  rc.require_all_used();
  m.grid(make_grid(k.L, k.N));
  m.begin(rc);
  const ProfileSet ps = build_profile_set(solve_gs(k), po);
  const std::pair<const char*, const RealField*> fields[] = {
      {"Q", &ps.gs.Q},       {"S10", &ps.S10},      {"S01_1", &ps.S01[0]}, {"S01_2", &ps.S01[1]},
      {"T20", &ps.T20},      {"T11_1", &ps.T11[0]}, {"T11_2", &ps.T11[1]}, {"T02_1", &ps.T02[0]},
      {"T02_2", &ps.T02[1]}, {"S21_1", &ps.S21[0]}, {"S21_2", &ps.S21[1]}};
  for (const auto& [name, f] : fields) {
    const fs::path p = out / (std::string(name) + ".hwf");
    write_field(p.string(), *f, {{"field", name}});
    m.output(p);
  }
  const Scan a = residual_scan_a(ps, av), b = residual_scan_b(ps, bv);
  write_json(out / "profiles.json", profile_report(ps, a, b), m);
  std::printf("e1 = %.10g, p1 = %.10g, T20 form %s, residual slopes a %.3f b %.3f\n", ps.e1, ps.p1,
              t20_form_name(ps.t20_form), a.slope, b.slope);
  return kPass;
}

int cmd_residual_scan(RunConfig& rc, const fs::path& out, Manifest& m) {
  const GridKeys k = grid_keys(rc, 16.0, 1024);
  const auto av = rc.get_list("a_values", {1e-2, 5e-3, 2.5e-3});
  const auto bv = rc.get_list("b_values", {1e-3, 5e-4, 2.5e-4});
  const bool partner = rc.get_bool("partner", true);
  rc.require_all_used();
  std::vector<GridKeys> grids{k};
  if (partner) grids.push_back({k.L / 2, k.N / 2, k.gs_tol, k.max_iter});
  for (const auto& g : grids) m.grid(make_grid(g.L, g.N));
  m.begin(rc);
  std::ofstream csv(out / "residual_scan.csv");
  csv << "L,N,kind,value,residual_l2\n";
  json report = json::array();
  char buf[128];
  for (const auto& g : grids) {
    const ProfileSet ps = build_profile_set(solve_gs(g));
    const Scan a = residual_scan_a(ps, av), b = residual_scan_b(ps, bv);
    for (const auto& [kind, s] : {std::pair{"a", &a}, std::pair{"b", &b}}) {
      for (const auto& r : s->rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%d,%s,%.17g,%.17g\n", g.L, g.N, kind, r.x, r.value);
        csv << buf;
      }
    }
    report.push_back({{"L", g.L}, {"N", g.N}, {"a", scan_json(a)}, {"b", scan_json(b)}});
    std::printf("L=%g N=%d: pure-a slope %.3f, pure-b slope %.3f\n", g.L, g.N, a.slope, b.slope);
  }
  m.output(out / "residual_scan.csv");
  write_json(out / "residual_scan.json", report, m);
  return kPass;
}

ModParams params_from(RunConfig& rc, const ModParams& def) {
  ModParams p;
  p.lambda = rc.get_double("lambda", def.lambda);
  p.alpha = rc.get_pair("alpha", def.alpha);
  p.gamma = rc.get_double("gamma", def.gamma);
  p.a = rc.get_double("a", def.a);
  p.b = rc.get_pair("b", def.b);
  if (!(p.lambda > 0.0)) throw ConfigError("lambda must be > 0");
  return p;
}

int cmd_decompose(RunConfig& rc, const fs::path& out, Manifest& m, const std::string& in,
                  const std::string& synth) {
  const GridKeys k = grid_keys(rc, 16.0, 1024);
  const double tol = rc.get_double("tol", 1e-10);
  const bool write_eps = rc.get_bool("write_eps", false);
  const bool have_init = synth.empty() && rc.has("lambda");
  ModParams target;
  if (!synth.empty() || have_init) target = params_from(rc, ModParams{});
  rc.require_all_used();
  if (synth.empty() && in.empty()) throw ConfigError("decompose needs --in or --synthesize");
  if (synth.empty() && !fs::exists(in)) throw ConfigError("no such field: " + in);
  const Grid2D window = make_grid(k.L, k.N);
  m.grid(window);
  m.begin(rc);
  const ModContext ctx(build_profile_set(solve_gs(k)));

  if (!synth.empty()) {
    const Grid2D phys(window.half_width() * target.lambda, window.points());
    const ComplexField u = synthesize(ctx, target, phys);
    write_field(synth, u, {{"params", to_json(target)}});
    m.note("synthesized", {{"path", synth}, {"params", to_json(target)}});
    std::printf("wrote %s on %s\n", synth.c_str(), phys.describe().c_str());
    return kPass;
  }

  const ComplexField u = read_complex_field(in);
  m.grid(u.grid);
  const ModParams init = have_init ? target : cold_start(u, ctx);
  DecomposeOptions opts;
  opts.tol = tol;
  const ModState st = decompose(u, ctx, init, opts);
  write_json(out / "decompose.json",
             {{"input", in},
              {"init", to_json(init)},
              {"params", to_json(st.params)},
              {"orthogonality", st.ortho},
              {"iterations", st.iterations},
              {"history", st.history},
              {"eps_l2", l2_norm(st.eps)}},
             m);
  if (write_eps) {
    write_field((out / "eps.hwf").string(), st.eps, {{"params", to_json(st.params)}});
    m.output(out / "eps.hwf");
  }
  const ModParams& p = st.params;
  std::printf("lambda %.10g alpha (%.6g, %.6g) gamma %.10g a %.10g b (%.6g, %.6g), %d iterations\n",
              p.lambda, p.alpha[0], p.alpha[1], p.gamma, p.a, p.b[0], p.b[1], st.iterations);
  return kPass;
}

BlowupConfig blowup_config(RunConfig& rc) {
  BlowupConfig c;
  c.E0_over_e1 = rc.get_double("E0_over_e1", c.E0_over_e1);
  c.P0_over_p1 = rc.get_pair("P0_over_p1", c.P0_over_p1);
  c.gamma0 = rc.get_double("gamma0", c.gamma0);
  c.x0 = rc.get_pair("x0", c.x0);
  c.t_start = rc.get_double("t_start", c.t_start);
  c.L = rc.get_double("L", c.L);
  c.N = rc.get_int("N", c.N);
  c.profile_L = rc.get_double("profile_L", c.profile_L);
  c.profile_N = rc.get_int("profile_N", c.profile_N);
  c.gs_tol = rc.get_double("gs_tol", c.gs_tol);
  c.c = rc.get_double("c", c.c);
  c.order = rc.get_int("order", c.order);
  c.checkpoint_stride = rc.get_int("checkpoint_stride", c.checkpoint_stride);
  c.lambda_min = rc.get_double("lambda_min", c.lambda_min);
  c.decompose_tol = rc.get_double("decompose_tol", c.decompose_tol);
  c.initial = parse_initial_data(rc.get_string("initial", initial_data_name(c.initial)));
  c.J_A_widths = rc.get_list("J_A_widths", c.J_A_widths);
  c.max_steps = rc.get_long("max_steps", c.max_steps);
  c.validate();
  return c;
}

int cmd_simulate(RunConfig& rc, const fs::path& out, Manifest& m) {
  const BlowupConfig cfg = blowup_config(rc);
  const bool checkpoints = rc.get_bool("checkpoints", false);
  FitOptions fo;
  fo.skip_transient = rc.get_double("skip_transient", fo.skip_transient);
  rc.require_all_used();
  m.grid(physical_grid(cfg));
  m.grid(make_grid(cfg.profile_L, cfg.profile_N));
  m.begin(rc);
  const auto t0 = Clock::now();
  const ModContext ctx = build_context(cfg);
  std::vector<Observer> obs;
  if (checkpoints) obs.push_back(checkpoint_observer((out / "checkpoints").string(), "u"));
  obs.push_back([](const Sample& s, const TrajectoryRow& r) {
    std::printf("t %.6f step %ld lambda %.6g M %.10g E %.8g\n", s.t, s.step, r.mod->lambda, r.mass,
                r.energy);
    std::fflush(stdout);
  });
  BlowupSeries series;
  try {
    series = run_blowup(cfg, ctx, obs);
  } catch (const BlowupError& e) {
    write_series_csv((out / "series.csv").string(), e.partial());
    m.output(out / "series.csv");
    throw;
  }
  const double seconds = seconds_since(t0);
  m.note("run_seconds", seconds);
  write_series_csv((out / "series.csv").string(), series);
  m.output(out / "series.csv");
  json report{{"constants", to_json(series.constants)},
              {"halt_reason", series.halt_reason},
              {"steps", series.steps},
              {"rows", series.rows.size()},
              {"lambda_floor", series.lambda_floor},
              {"initial", initial_data_name(cfg.initial)}};
  const FitReport fit = fit_blowup_laws(series, fo);
  report["fit"] = to_json(fit);
  CheckTable laws = blowup_table(fit, series.constants, seconds);
  laws.merge(ode_consistency_table(fit));
  report["checks"] = laws.to_json();
  write_json(out / "fit.json", report, m);
  std::cout << "halt: " << series.halt_reason << "\n";
  laws.print(std::cout);
  return kPass;
}

/// Columns of a CSV with a header row, by name.
std::map<std::string, std::vector<double>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> names;
  {
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) names.push_back(item);
  }
  std::map<std::string, std::vector<double>> cols;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string item;
    for (const auto& n : names) {
      if (!std::getline(ss, item, ',')) throw std::runtime_error(path + ": short row");
      cols[n].push_back(parse_double(item, n));
    }
  }
  return cols;
}

int cmd_report(RunConfig& rc, const fs::path& out, Manifest& m, const std::string& in,
               std::string fit_path) {
  rc.require_all_used();
  if (in.empty()) throw ConfigError("report needs --in series.csv");
  if (fit_path.empty()) fit_path = (fs::path(in).parent_path() / "fit.json").string();
  if (!fs::exists(in)) throw ConfigError("no such series: " + in);
  if (!fs::exists(fit_path)) throw ConfigError("no such fit report: " + fit_path);
  m.begin(rc);
  m.note("inputs", {in, fit_path});
  auto cols = read_csv(in);
  json fit;
  std::ifstream(fit_path) >> fit;
  const double A0 = fit.at("constants").at("A0").get<double>();
  const auto B0 = fit.at("constants").at("B0").get<std::array<double, 2>>();
  const auto& t = cols.at("t");
  const auto& lam = cols.at("lambda");
  const auto& a = cols.at("a");
  const auto& b1 = cols.at("b1");
  const auto& b2 = cols.at("b2");
  const auto& hn = cols.at("half_norm");
  auto dat = [&](const char* name, const char* header, auto row) {
    const fs::path p = out / name;
    std::ofstream os(p);
    os << "# " << header << "\n";
    char buf[160];
    for (std::size_t i = 0; i < t.size(); ++i) {
      row(i, buf, sizeof buf);
      os << buf;
    }
    m.output(p);
  };
  dat("lambda.dat", "t lambda t^2/(4 A0^2)", [&](std::size_t i, char* buf, std::size_t n) {
    std::snprintf(buf, n, "%.12e %.12e %.12e\n", t[i], lam[i], t[i] * t[i] / (4.0 * A0 * A0));
  });
  dat("a_ratio.dat", "t a/sqrt(lambda) 1/A0", [&](std::size_t i, char* buf, std::size_t n) {
    std::snprintf(buf, n, "%.12e %.12e %.12e\n", t[i], a[i] / std::sqrt(lam[i]), 1.0 / A0);
  });
  dat("b_ratio.dat", "t b1/lambda b2/lambda B0_1 B0_2", [&](std::size_t i, char* buf, std::size_t n) {
    std::snprintf(buf, n, "%.12e %.12e %.12e %.12e %.12e\n", t[i], b1[i] / lam[i], b2[i] / lam[i],
                  B0[0], B0[1]);
  });
  dat("half_norm.dat", "t ||D^{1/2}u|| ||D^{1/2}u||*|t|", [&](std::size_t i, char* buf, std::size_t n) {
    std::snprintf(buf, n, "%.12e %.12e %.12e\n", t[i], hn[i], hn[i] * std::abs(t[i]));
  });
  std::printf("wrote 4 data files for %zu rows\n", t.size());
  return kPass;
}

struct VerifyKeys {
  double gs_L;
  int gs_N;
  double L;
  int N;
  double tol;
  bool doubling;
  bool coercivity;
  bool blowup;
  unsigned seed;
};

int cmd_verify(RunConfig& rc, const fs::path& out, Manifest& m) {
  VerifyKeys k{rc.get_double("gs_L", 64.0),     rc.get_int("gs_N", 512),
               rc.get_double("L", 16.0),        rc.get_int("N", 1024),
               rc.get_double("tol", 1e-10),     rc.get_bool("doubling", true),
               rc.get_bool("coercivity", true), rc.get_bool("blowup", false),
               static_cast<unsigned>(rc.get_long("seed", 7))};
  const int max_iter = rc.get_int("max_iter", 3000);
  const double profile_tol = rc.get_double("profile_gs_tol", 1e-11);
  BlowupConfig bcfg;
  bcfg.P0_over_p1 = {0.05, 0.0};
  if (k.blowup) bcfg = blowup_config(rc);
  rc.require_all_used();
  const Grid2D gg = make_grid(k.gs_L, k.gs_N);
  const Grid2D g = make_grid(k.L, k.N);
  const Grid2D partner = make_grid(k.L / 2, k.N / 2);
  m.grid(gg);
  m.grid(g);
  m.grid(partner);
  m.begin(rc);

  std::vector<CheckTable> tables;
  auto t0 = Clock::now();
  const GroundState gs0 = solve_ground_state(gg, k.tol, max_iter);
  if (k.doubling) {
    const GroundState big = solve_ground_state(make_grid(2 * k.gs_L, 2 * k.gs_N), k.tol, max_iter);
    tables.push_back(ground_state_table(gs0, big, seconds_since(t0), k.tol));
  } else {
    CheckTable t("Ground state");
    t.at_most("PDE residual / ||Q||", gs0.residual, k.tol);
    tables.push_back(t);
  }
  const GroundState gs = solve_ground_state(g, profile_tol, max_iter);
  const ProfileSet ps = build_profile_set(gs);
  const ProfileSet pp = build_profile_set(solve_ground_state(partner, profile_tol, max_iter));
  tables.push_back(identity_table(ps));
  tables.push_back(residual_scan_table(ps, pp));
  tables.push_back(expansion_table(ps));
  const ModContext ctx(ps);
  tables.push_back(decomposition_table(ctx));
  tables.push_back(integrator_table(integrator_study()));
  if (k.coercivity) {
    EigenOptions eo;
    eo.seed = k.seed;
    tables.push_back(coercivity_table(coercivity_study(ps, eo), coercivity_study(pp, eo)));
  }
  if (k.blowup) {
    t0 = Clock::now();
    const ModContext bctx = build_context(bcfg);
    const BlowupSeries s = run_blowup(bcfg, bctx);
    const FitReport fit = fit_blowup_laws(s);
    tables.push_back(blowup_table(fit, s.constants, seconds_since(t0)));
    tables.push_back(ode_consistency_table(fit));
  }

  json report = json::array();
  bool ok = true;
  for (const auto& t : tables) {
    std::cout << (t.passed() ? "PASS " : "FAIL ") << t.title() << "\n";
    t.print(std::cout);
    report.push_back(t.to_json());
    ok = ok && t.passed();
  }
  write_json(out / "verify.json", {{"pass", ok}, {"tables", report}}, m);
  m.note("verdict", ok ? "pass" : "fail");
  return ok ? kPass : kVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blowup lab for the 2D half-wave equation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", HALFWAVE_VERSION);

  Common common;
  std::string in, fit, synth;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "key=value config file")->check(CLI::ExistingFile);
    sub->add_option("--set", common.sets, "override one key (key=value), repeatable");
    sub->add_option("--grid", common.grid, "grid keys, e.g. L=64,N=512");
    sub->add_option("--out", common.out, "output directory (default out/<subcommand>)");
  };
  auto* gs = app.add_subcommand("ground-state", "Petviashvili ground state");
  auto* prof = app.add_subcommand("profiles", "profile corrections, e1, p1 and pairings");
  auto* scan = app.add_subcommand("residual-scan", "profile residual scaling scans");
  auto* dec = app.add_subcommand("decompose", "modulation decomposition of a field");
  auto* sim = app.add_subcommand("simulate", "blowup run and law fits");
  auto* rep = app.add_subcommand("report", "gnuplot data from a simulate run");
  auto* ver = app.add_subcommand("verify", "invariant suite; exit 3 on any failure");
  for (auto* s : {gs, prof, scan, dec, sim, rep, ver}) add_common(s);
  std::string tol;
  ver->add_option("--tol", tol, "ground-state tolerance");
  dec->add_option("--in", in, "field container");
  dec->add_option("--synthesize", synth, "write Q_P under the given parameters to this path");
  rep->add_option("--in", in, "series.csv from simulate");
  rep->add_option("--fit", fit, "fit.json (default beside the series)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  const fs::path out = common.out.empty() ? fs::path("out") / name : fs::path(common.out);
  json argv_json = json::array();
  for (int i = 0; i < argc; ++i) argv_json.push_back(argv[i]);

  std::unique_ptr<Manifest> manifest;
  try {
    RunConfig rc = load_config(common);
    if (!tol.empty()) rc.set("tol", tol);
    fs::create_directories(out);
    manifest = std::make_unique<Manifest>(out, name, argv_json);
    int code = kPass;
    if (name == "ground-state") code = cmd_ground_state(rc, out, *manifest);
    if (name == "profiles") code = cmd_profiles(rc, out, *manifest);
    if (name == "residual-scan") code = cmd_residual_scan(rc, out, *manifest);
    if (name == "decompose") code = cmd_decompose(rc, out, *manifest, in, synth);
    if (name == "simulate") code = cmd_simulate(rc, out, *manifest);
    if (name == "report") code = cmd_report(rc, out, *manifest, in, fit);
    if (name == "verify") code = cmd_verify(rc, out, *manifest);
    manifest->finish("complete");
    return code;
  } catch (const std::exception& e) {
    const bool usage = !manifest || !manifest->started();
    std::cerr << "halfwave " << name << ": " << e.what() << "\n";
    if (manifest) manifest->finish(usage ? "rejected" : "incomplete", e.what());
    return usage ? kUsage : kCompute;
  }
}
