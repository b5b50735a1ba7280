#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "halfwave/field.hpp"
#include "halfwave/modulation.hpp"

namespace halfwave {

/// Substep switches for checks of the splitting.
struct StepOptions {
  bool linear = true;
  bool nonlinear = true;
  bool dealias = true;
  /// 2: one Strang step. 4: triple jump of Strang steps with weights
  /// w1, 1 - 2 w1, w1, w1 = 1/(2 - 2^{1/3}).
  int order = 2;
};

/// One Strang step of i u_t = D u - |u| u:
/// u e^{i|u|dt/2}, then e^{-i|k|dt} in Fourier space, then u e^{i|u|dt/2}.
/// The 2/3 rule is applied after each nonlinear substep. Within a composed
/// step, adjacent nonlinear half steps are merged.
class Stepper {
 public:
  explicit Stepper(const Grid2D& g, StepOptions opts = {});
  ComplexField step(const ComplexField& u, double dt) { return advance(u, dt, 1); }
  /// `steps` consecutive steps. Nonlinear half steps at step boundaries are
  /// merged; each is still followed by the masked linear substep, and the
  /// final one by an explicit dealias.
  ComplexField advance(const ComplexField& u, double dt, int steps);
  const StepOptions& options() const { return opts_; }

 private:
  void nonlinear(std::vector<cplx>& u, double h) const;
  const std::vector<cplx>& linear_multiplier(double dt);

  Grid2D grid_;
  StepOptions opts_;
  std::vector<std::pair<double, std::vector<cplx>>> multipliers_;
};

ComplexField step(const ComplexField& u, double dt, const StepOptions& opts = {});

/// Raised when a step produces non-finite values.
class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(const std::string& what, double t_last, ComplexField last)
      : std::runtime_error(what), t_last_(t_last), last_(std::move(last)) {}
  double last_time() const { return t_last_; }
  const ComplexField& last_finite() const { return last_; }

 private:
  double t_last_;
  ComplexField last_;
};

enum class DtPolicy { fixed, adaptive };

struct Schedule {
  double t_start = 0.0;
  double t_end = 1.0;
  DtPolicy policy = DtPolicy::fixed;
  /// Step for the fixed policy.
  double dt = 1e-3;
  /// dt = c * lambda for the adaptive policy.
  double c = 0.05;
  int checkpoint_stride = 1;
  /// Halt when lambda < lambda_min; 0 means 8 dx.
  double lambda_min = 0.0;
  long max_steps = 1000000;

  void validate(bool has_decomposer) const;
};

struct Sample {
  double t;
  long step;
  const ComplexField& u;
};

/// Conservation and modulation log row.
struct TrajectoryRow {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  std::array<double, 2> momentum{0.0, 0.0};
  std::optional<ModParams> mod;
  double half_norm = 0.0;
};

using Observer = std::function<void(const Sample&, const TrajectoryRow&)>;
/// Returns the modulation parameters of the field; required for adaptive dt.
using Decomposer = std::function<ModParams(const Sample&)>;

struct RunResult {
  ComplexField u;
  double t = 0.0;
  long steps = 0;
  std::string halt_reason;
  std::vector<TrajectoryRow> log;
};

/// Steps from t_start toward t_end, logging at every checkpoint stride and
/// at the final time. Observers run in registration order after the log row
/// is formed.
RunResult run(const ComplexField& u0, const Schedule& schedule,
              const std::vector<Observer>& observers = {}, Decomposer decomposer = {},
              StepOptions opts = {});

TrajectoryRow log_row(double t, const ComplexField& u);

/// CSV with header t,M,E,P1,P2,lambda,a,b1,b2,half_norm.
void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRow>& rows);

/// Writes <dir>/<prefix>_<step>.hwf at every call.
Observer checkpoint_observer(const std::string& dir, const std::string& prefix);

}  // namespace halfwave
