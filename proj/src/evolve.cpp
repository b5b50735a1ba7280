#include "halfwave/evolve.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "halfwave/fft.hpp"
#include "halfwave/field_io.hpp"
#include "halfwave/spectral.hpp"

namespace halfwave {

Stepper::Stepper(const Grid2D& g, StepOptions opts) : grid_(g), opts_(opts) {
  if (opts_.order != 2 && opts_.order != 4) throw PreconditionError("step order must be 2 or 4");
}

void Stepper::nonlinear(std::vector<cplx>& u, double h) const {
  for (cplx& v : u) v *= std::polar(1.0, std::abs(v) * h);
}

const std::vector<cplx>& Stepper::linear_multiplier(double dt) {
  for (const auto& [h, m] : multipliers_) {
    if (h == dt) return m;
  }
  if (multipliers_.size() >= 4) multipliers_.clear();
  const auto& k = abs_wavenumbers(grid_);
  std::vector<cplx> mult(k.size());
  const int n = grid_.points(), third = n / 3;
  // The inverse transform is left unnormalized.
  const double scale = 1.0 / static_cast<double>(k.size());
  for (int m1 = 0; m1 < n; ++m1) {
    const bool drop1 = std::abs(grid_.frequency(m1)) > third;
    for (int m2 = 0; m2 < n; ++m2) {
      const std::size_t idx = std::size_t(m1) * n + m2;
      const bool drop = opts_.dealias && (drop1 || std::abs(grid_.frequency(m2)) > third);
      mult[idx] = drop ? cplx(0.0) : std::polar(scale, opts_.linear ? -k[idx] * dt : 0.0);
    }
  }
  multipliers_.emplace_back(dt, std::move(mult));
  return multipliers_.back().second;
}

ComplexField Stepper::advance(const ComplexField& u, double dt, int steps) {
  require_same_grid(u.grid, grid_, "step");
  if (steps < 1) throw PreconditionError("advance: steps must be >= 1");
  const int n = grid_.points();
  std::vector<double> one{dt};
  if (opts_.order == 4) {
    const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
    one = {w1 * dt, (1.0 - 2.0 * w1) * dt, w1 * dt};
  }
  std::vector<double> sub;
  for (int k = 0; k < steps; ++k) sub.insert(sub.end(), one.begin(), one.end());
  ComplexField out = u;
  std::vector<cplx>& v = out.values;
  auto apply = [&](double h) {
    fft::forward_inplace(v, n);
    const auto& mult = linear_multiplier(h);
    for (std::size_t m = 0; m < v.size(); ++m) v[m] *= mult[m];
    fft::backward_inplace(v, n, false);
  };
  double pending = 0.5 * sub.front();
  for (std::size_t k = 0; k < sub.size(); ++k) {
    if (opts_.nonlinear) nonlinear(v, pending);
    if (opts_.linear || opts_.dealias) apply(sub[k]);
    pending = 0.5 * sub[k] + (k + 1 < sub.size() ? 0.5 * sub[k + 1] : 0.0);
  }
  if (opts_.nonlinear) {
    nonlinear(v, pending);
    if (opts_.dealias) {
      const bool linear = opts_.linear;
      opts_.linear = false;
      apply(0.0);
      opts_.linear = linear;
    }
  }
  return out;
}

ComplexField step(const ComplexField& u, double dt, const StepOptions& opts) {
  Stepper s(u.grid, opts);
  return s.step(u, dt);
}

void Schedule::validate(bool has_decomposer) const {
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || t_start == t_end) {
    throw PreconditionError("schedule: t_end must differ from t_start");
  }
  if (policy == DtPolicy::fixed && !(dt > 0.0)) throw PreconditionError("schedule: dt must be > 0");
  if (policy == DtPolicy::adaptive) {
    if (!(c > 0.0)) throw PreconditionError("schedule: c must be > 0");
    if (!has_decomposer) {
      throw PreconditionError("schedule: adaptive dt needs a decomposition callback");
    }
  }
  if (checkpoint_stride < 1) throw PreconditionError("schedule: checkpoint_stride must be >= 1");
  if (lambda_min < 0.0) throw PreconditionError("schedule: lambda_min must be >= 0");
}

TrajectoryRow log_row(double t, const ComplexField& u) {
  TrajectoryRow r;
  const ConservedTriple c = functionals(u, &r.half_norm);
  r.t = t;
  r.mass = c.mass;
  r.energy = c.energy;
  r.momentum = c.momentum;
  return r;
}

RunResult run(const ComplexField& u0, const Schedule& sc, const std::vector<Observer>& observers,
              Decomposer decomposer, StepOptions opts) {
  sc.validate(static_cast<bool>(decomposer));
  if (!u0.all_finite()) throw PreconditionError("run: initial field is not finite");
  const double dir = sc.t_end > sc.t_start ? 1.0 : -1.0;
  const double lambda_min = sc.lambda_min > 0.0 ? sc.lambda_min : 8.0 * u0.grid.spacing();
  Stepper stepper(u0.grid, opts);

  RunResult res{u0, sc.t_start, 0, "", {}};
  ComplexField last_good = u0;
  double t_good = sc.t_start;
  double lambda = std::numeric_limits<double>::quiet_NaN();

  auto checkpoint = [&]() {
    TrajectoryRow row = log_row(res.t, res.u);
    const Sample smp{res.t, res.steps, res.u};
    if (decomposer) {
      row.mod = decomposer(smp);
      lambda = row.mod->lambda;
    }
    for (const auto& ob : observers) ob(smp, row);
    res.log.push_back(row);
    last_good = res.u;
    t_good = res.t;
  };

  checkpoint();
  while (true) {
    if (decomposer && lambda < lambda_min) {
      std::ostringstream os;
      os << "lambda " << lambda << " below resolvability floor " << lambda_min;
      res.halt_reason = os.str();
      break;
    }
    const double remaining = (sc.t_end - res.t) * dir;
    if (remaining <= 1e-14 * std::max(1.0, std::abs(sc.t_end))) {
      res.halt_reason = "reached t_end";
      break;
    }
    if (res.steps >= sc.max_steps) {
      res.halt_reason = "max_steps";
      break;
    }
    double h = sc.policy == DtPolicy::fixed ? sc.dt : sc.c * lambda;
    long block = sc.checkpoint_stride - res.steps % sc.checkpoint_stride;
    block = std::min(block, sc.max_steps - res.steps);
    const bool last = block * h >= remaining * (1.0 - 1e-12);
    if (last) {
      block = std::max(1L, static_cast<long>(std::ceil(remaining / h - 1e-9)));
      h = remaining / block;
    }
    res.u = stepper.advance(res.u, dir * h, static_cast<int>(block));
    res.t = last ? sc.t_end : res.t + dir * h * block;
    res.steps += block;
    if (!res.u.all_finite()) {
      throw NonFiniteError("run: non-finite field at t = " + std::to_string(res.t), t_good,
                           last_good);
    }
    checkpoint();
  }
  if (res.log.empty() || res.log.back().t != res.t) checkpoint();
  return res;
}

void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRow>& rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "t,M,E,P1,P2,lambda,a,b1,b2,half_norm\n";
  char buf[512];
  for (const auto& r : rows) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const ModParams m = r.mod.value_or(ModParams{nan, {nan, nan}, nan, nan, {nan, nan}});
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.t, r.mass, r.energy, r.momentum[0], r.momentum[1], m.lambda, m.a, m.b[0],
                  m.b[1], r.half_norm);
    os << buf;
  }
}

Observer checkpoint_observer(const std::string& dir, const std::string& prefix) {
  std::filesystem::create_directories(dir);
  return [dir, prefix](const Sample& s, const TrajectoryRow&) {
    char name[64];
    std::snprintf(name, sizeof name, "_%06ld.hwf", s.step);
    write_field((std::filesystem::path(dir) / (prefix + name)).string(), s.u,
                nlohmann::json{{"t", s.t}, {"step", s.step}});
  };
}

}  // namespace halfwave
