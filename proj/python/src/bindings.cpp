#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "halfwave/checks.hpp"
#include "halfwave/evolve.hpp"
#include "halfwave/experiment.hpp"
#include "halfwave/spectral.hpp"

namespace py = pybind11;
using namespace halfwave;

namespace {

using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ComplexArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

py::object from_json(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      py::dict d;
      for (const auto& [k, v] : j.items()) d[py::str(k)] = from_json(v);
      return d;
    }
    case nlohmann::json::value_t::array: {
      py::list l;
      for (const auto& v : j) l.append(from_json(v));
      return l;
    }
    case nlohmann::json::value_t::string:
      return py::str(j.get<std::string>());
    case nlohmann::json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case nlohmann::json::value_t::number_integer:
    case nlohmann::json::value_t::number_unsigned:
      return py::int_(j.get<long long>());
    case nlohmann::json::value_t::number_float:
      return py::float_(j.get<double>());
    default:
      return py::none();
  }
}

int square_side(const py::buffer_info& b) {
  if (b.ndim != 2 || b.shape[0] != b.shape[1]) throw PreconditionError("expected a square 2D array");
  return static_cast<int>(b.shape[0]);
}

RealArray to_array(const RealField& f) {
  const auto n = static_cast<py::ssize_t>(f.grid.points());
  RealArray a({n, n});
  std::copy(f.values.begin(), f.values.end(), a.mutable_data());
  return a;
}

ComplexArray to_array(const ComplexField& f) {
  const auto n = static_cast<py::ssize_t>(f.grid.points());
  ComplexArray a({n, n});
  std::copy(f.values.begin(), f.values.end(), a.mutable_data());
  return a;
}

ComplexField to_field(const ComplexArray& a, double L) {
  const int n = square_side(a.request());
  const Grid2D g = make_grid(L, n);
  return ComplexField(g, std::vector<cplx>(a.data(), a.data() + a.size()));
}

ModParams params_from(const py::dict& d) {
  ModParams m;
  for (const auto& [k, v] : d) {
    const std::string key = py::cast<std::string>(k);
    if (key == "lambda") {
      m.lambda = py::cast<double>(v);
    } else if (key == "alpha") {
      m.alpha = py::cast<std::array<double, 2>>(v);
    } else if (key == "gamma") {
      m.gamma = py::cast<double>(v);
    } else if (key == "a") {
      m.a = py::cast<double>(v);
    } else if (key == "b") {
      m.b = py::cast<std::array<double, 2>>(v);
    } else {
      throw PreconditionError("unknown modulation parameter '" + key + "'");
    }
  }
  return m;
}

py::dict params_dict(const ModParams& m) { return from_json(to_json(m)); }

BlowupConfig config_from(const py::dict& d) {
  BlowupConfig c;
  for (const auto& [k, v] : d) {
    const std::string key = py::cast<std::string>(k);
    if (key == "E0_over_e1") c.E0_over_e1 = py::cast<double>(v);
    else if (key == "P0_over_p1") c.P0_over_p1 = py::cast<std::array<double, 2>>(v);
    else if (key == "gamma0") c.gamma0 = py::cast<double>(v);
    else if (key == "x0") c.x0 = py::cast<std::array<double, 2>>(v);
    else if (key == "t_start") c.t_start = py::cast<double>(v);
    else if (key == "L") c.L = py::cast<double>(v);
    else if (key == "N") c.N = py::cast<int>(v);
    else if (key == "profile_L") c.profile_L = py::cast<double>(v);
    else if (key == "profile_N") c.profile_N = py::cast<int>(v);
    else if (key == "gs_tol") c.gs_tol = py::cast<double>(v);
    else if (key == "c") c.c = py::cast<double>(v);
    else if (key == "order") c.order = py::cast<int>(v);
    else if (key == "checkpoint_stride") c.checkpoint_stride = py::cast<int>(v);
    else if (key == "lambda_min") c.lambda_min = py::cast<double>(v);
    else if (key == "decompose_tol") c.decompose_tol = py::cast<double>(v);
    else if (key == "initial") c.initial = parse_initial_data(py::cast<std::string>(v));
    else if (key == "J_A_widths") c.J_A_widths = py::cast<std::vector<double>>(v);
    else if (key == "max_steps") c.max_steps = py::cast<long>(v);
    else throw PreconditionError("unknown blowup config key '" + key + "'");
  }
  c.validate();
  return c;
}

py::dict series_dict(const BlowupSeries& s) {
  std::vector<double> t, lambda, a, b1, b2, gamma, half, mass, energy;
  for (const auto& r : s.rows) {
    t.push_back(r.t);
    lambda.push_back(r.params.lambda);
    a.push_back(r.params.a);
    b1.push_back(r.params.b[0]);
    b2.push_back(r.params.b[1]);
    gamma.push_back(r.params.gamma);
    half.push_back(r.half_norm);
    mass.push_back(r.conserved.mass);
    energy.push_back(r.conserved.energy);
  }
  py::dict d;
  d["t"] = t;
  d["lambda"] = lambda;
  d["a"] = a;
  d["b1"] = b1;
  d["b2"] = b2;
  d["gamma"] = gamma;
  d["half_norm"] = half;
  d["mass"] = mass;
  d["energy"] = energy;
  d["constants"] = from_json(to_json(s.constants));
  d["halt_reason"] = s.halt_reason;
  d["steps"] = s.steps;
  d["wall_seconds"] = s.wall_seconds;
  return d;
}

py::dict table_dict(const CheckTable& t) { return from_json(t.to_json()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "2D half-wave equation blowup lab";
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  m.def("coordinates", [](double L, int N) {
    const Grid2D g = make_grid(L, N);
    std::vector<double> x(N);
    for (int i = 0; i < N; ++i) x[i] = g.coord(i);
    return x;
  }, py::arg("L"), py::arg("N"), "Node coordinates -L + i dx along one axis.");

  m.def("ground_state", [](double L, int N, double tol, int max_iter) {
    std::optional<GroundState> opt;
    {
      py::gil_scoped_release nogil;
      opt.emplace(solve_ground_state(make_grid(L, N), tol, max_iter));
    }
    const GroundState& gs = *opt;
    py::dict d;
    d["Q"] = to_array(gs.Q);
    d["residual"] = gs.residual;
    d["mass_sq"] = gs.mass_sq;
    d["iterations"] = gs.iterations;
    d["history"] = gs.history;
    return d;
  }, py::arg("L") = 64.0, py::arg("N") = 512, py::arg("tol") = 1e-10, py::arg("max_iter") = 2000);

  py::class_<ProfileSet>(m, "Profiles")
      .def_property_readonly("L", [](const ProfileSet& p) { return p.grid().half_width(); })
      .def_property_readonly("N", [](const ProfileSet& p) { return p.grid().points(); })
      .def_readonly("e1", &ProfileSet::e1)
      .def_readonly("p1", &ProfileSet::p1)
      .def_readonly("t20_defects", &ProfileSet::t20_defects)
      .def_readonly("pairings", &ProfileSet::pairings)
      .def_readonly("solve_residuals", &ProfileSet::solve_residuals)
      .def_property_readonly("t20_form", [](const ProfileSet& p) { return std::string(t20_form_name(p.t20_form)); })
      .def("field", [](const ProfileSet& p, const std::string& name) {
        if (name == "Q") return to_array(p.gs.Q);
        if (name == "S10") return to_array(p.S10);
        if (name == "T20") return to_array(p.T20);
        const std::array<std::pair<const char*, const std::array<RealField, 2>*>, 4> pairs{{
            {"S01", &p.S01}, {"T11", &p.T11}, {"T02", &p.T02}, {"S21", &p.S21}}};
        for (const auto& [stem, f] : pairs) {
          for (int j = 0; j < 2; ++j) {
            if (name == std::string(stem) + "_" + std::to_string(j + 1)) return to_array((*f)[j]);
          }
        }
        throw PreconditionError("unknown profile field '" + name + "'");
      }, py::arg("name"), "Q, S10, T20, or S01/T11/T02/S21 with suffix _1 or _2.")
      .def("assemble", [](const ProfileSet& p, double a, std::array<double, 2> b) {
        return to_array(assemble_profile(p, ProfileParams{a, b}));
      }, py::arg("a") = 0.0, py::arg("b") = std::array<double, 2>{0.0, 0.0})
      .def("residual_norm", [](const ProfileSet& p, double a, std::array<double, 2> b) {
        return profile_residual(p, ProfileParams{a, b}).l2_norm;
      }, py::arg("a") = 0.0, py::arg("b") = std::array<double, 2>{0.0, 0.0})
      .def("expansion", [](const ProfileSet& p, double a, std::array<double, 2> b) {
        const ExpansionRecord r = expansion_check(p, ProfileParams{a, b});
        py::dict d;
        d["mass_dev"] = r.mass_dev;
        d["energy_dev"] = r.energy_dev;
        d["momentum_dev"] = r.momentum_dev;
        return d;
      }, py::arg("a") = 0.0, py::arg("b") = std::array<double, 2>{0.0, 0.0});

  m.def("build_profiles", [](double L, int N, double gs_tol, int max_iter) {
    py::gil_scoped_release nogil;
    return build_profile_set(solve_ground_state(make_grid(L, N), gs_tol, max_iter));
  }, py::arg("L") = 16.0, py::arg("N") = 1024, py::arg("gs_tol") = 1e-11, py::arg("max_iter") = 3000);

  py::class_<ModContext>(m, "Context")
      .def(py::init([](const ProfileSet& ps) {
        py::gil_scoped_release nogil;
        return new ModContext(ps);
      }), py::arg("profiles"))
      .def_property_readonly("profiles", &ModContext::profiles, py::return_value_policy::reference_internal);

  m.def("synthesize", [](const ModContext& ctx, const py::dict& params, double L, int N) {
    return to_array(synthesize(ctx, params_from(params), make_grid(L, N)));
  }, py::arg("ctx"), py::arg("params"), py::arg("L"), py::arg("N"),
     "Q_P under the modulation parameters, sampled on the (L, N) grid.");

  m.def("decompose", [](const ModContext& ctx, const ComplexArray& u, double L,
                        std::optional<py::dict> init, double tol) {
    const ComplexField f = to_field(u, L);
    const ModParams start = init ? params_from(*init) : cold_start(f, ctx);
    DecomposeOptions opts;
    opts.tol = tol;
    std::optional<ModState> opt;
    {
      py::gil_scoped_release nogil;
      opt.emplace(decompose(f, ctx, start, opts));
    }
    const ModState& s = *opt;
    py::dict d;
    d["params"] = params_dict(s.params);
    d["ortho"] = s.ortho;
    d["iterations"] = s.iterations;
    d["eps"] = to_array(s.eps);
    return d;
  }, py::arg("ctx"), py::arg("u"), py::arg("L"), py::arg("init") = py::none(), py::arg("tol") = 1e-10);

  m.def("step", [](const ComplexArray& u, double L, double dt, int steps, int order, bool dealias) {
    ComplexField f = to_field(u, L);
    {
      py::gil_scoped_release nogil;
      Stepper st(f.grid, StepOptions{true, true, dealias, order});
      f = st.advance(f, dt, steps);
    }
    return to_array(f);
  }, py::arg("u"), py::arg("L"), py::arg("dt"), py::arg("steps") = 1, py::arg("order") = 2,
     py::arg("dealias") = true);

  m.def("functionals", [](const ComplexArray& u, double L) {
    double half = 0.0;
    const ConservedTriple c = functionals(to_field(u, L), &half);
    py::dict d;
    d["mass"] = c.mass;
    d["energy"] = c.energy;
    d["momentum"] = c.momentum;
    d["half_norm"] = half;
    return d;
  }, py::arg("u"), py::arg("L"));

  m.def("self_similar_params", [](double A0, std::array<double, 2> B0, double t) {
    BlowupConstants k;
    k.A0 = A0;
    k.B0 = B0;
    return params_dict(self_similar_params(k, t));
  }, py::arg("A0"), py::arg("B0"), py::arg("t"));

  m.def("ode_reference", [](const std::vector<double>& t, const py::dict& init) {
    py::list out;
    for (const auto& r : self_similar_ode_reference(t, params_from(init))) {
      py::dict d = params_dict(r.params);
      d["t"] = r.t;
      d["s"] = r.s;
      out.append(d);
    }
    return out;
  }, py::arg("t"), py::arg("init"));

  m.def("run_blowup", [](const py::dict& config, double skip_transient) {
    const BlowupConfig cfg = config_from(config);
    BlowupSeries s;
    {
      py::gil_scoped_release nogil;
      s = run_blowup(cfg);
    }
    py::dict d = series_dict(s);
    FitOptions fo;
    fo.skip_transient = skip_transient;
    const FitReport fit = fit_blowup_laws(s, fo);
    CheckTable laws = blowup_table(fit, s.constants, s.wall_seconds);
    laws.merge(ode_consistency_table(fit));
    d["fit"] = from_json(to_json(fit));
    d["checks"] = table_dict(laws);
    return d;
  }, py::arg("config") = py::dict(), py::arg("skip_transient") = 0.0);

  m.def("integrator_study", [](int steps) {
    const IntegratorStudy s = integrator_study(steps);
    py::dict d;
    d["mass_drift"] = s.mass_drift;
    d["reversal"] = s.reversal;
    d["reversal_dealiased"] = s.reversal_dealiased;
    d["dts"] = s.dts;
    d["energy_drift"] = s.energy_drift;
    d["energy_order"] = s.energy_order;
    d["plane_wave"] = s.plane_wave;
    d["checks"] = table_dict(integrator_table(s));
    return d;
  }, py::arg("steps") = 1000);

  m.def("identity_checks", [](const ProfileSet& ps) { return table_dict(identity_table(ps)); });
  m.def("expansion_checks", [](const ProfileSet& ps) { return table_dict(expansion_table(ps)); });
  m.def("residual_scan_checks", [](const ProfileSet& ps, const ProfileSet& partner) {
    return table_dict(residual_scan_table(ps, partner));
  });
  m.def("decomposition_checks", [](const ModContext& ctx) {
    py::gil_scoped_release nogil;
    const CheckTable t = decomposition_table(ctx);
    py::gil_scoped_acquire gil;
    return table_dict(t);
  });
  m.def("coercivity_checks", [](const ProfileSet& fine, const ProfileSet& coarse) {
    return table_dict(coercivity_table(coercivity_study(fine), coercivity_study(coarse)));
  });
}
