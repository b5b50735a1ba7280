#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "halfwave/evolve.hpp"
#include "halfwave/modulation.hpp"
#include "halfwave/spectral.hpp"

namespace halfwave {

enum class InitialData {
  /// Parameters set from the self-similar laws at t_start.
  self_similar,
  /// Same lambda, alpha, gamma, b; a rescaled so that E(u0) = E0 on the grid.
  energy_matched,
};

const char* initial_data_name(InitialData k);
InitialData parse_initial_data(const std::string& s);

/// E0 and P0 are given in units of e1 and p1, which depend on the profile grid.
struct BlowupConfig {
  double E0_over_e1 = 1.0;
  std::array<double, 2> P0_over_p1{0.0, 0.0};
  double gamma0 = 0.0;
  std::array<double, 2> x0{0.0, 0.0};
  double t_start = -0.5;
  /// Physical grid.
  double L = 1.0;
  int N = 2048;
  /// Profile and decomposition window grid.
  double profile_L = 16.0;
  int profile_N = 1024;
  double gs_tol = 1e-10;
  double c = 0.025;
  /// Splitting order, see StepOptions.
  int order = 4;
  int checkpoint_stride = 4;
  /// Halting floor; 0 means the larger of 8 dx and the window's resampling limit.
  double lambda_min = 0.0;
  double decompose_tol = 1e-10;
  InitialData initial = InitialData::self_similar;
  std::vector<double> J_A_widths{5.0, 10.0, 20.0};
  long max_steps = 100000;

  void validate() const;
};

/// A0 = sqrt(e1/E0), B0 = P0/p1.
struct BlowupConstants {
  double e1 = 0.0;
  double p1 = 0.0;
  double E0 = 0.0;
  std::array<double, 2> P0{0.0, 0.0};
  double A0 = 0.0;
  std::array<double, 2> B0{0.0, 0.0};
  double gamma0 = 0.0;
  std::array<double, 2> x0{0.0, 0.0};
};

BlowupConstants blowup_constants(const BlowupConfig& cfg, const ProfileSet& ps);

/// lambda = t^2/(4 A0^2), a = -t/(2 A0^2), b = B0 lambda, alpha = x0,
/// gamma = gamma0 - 4 A0^2/t.
ModParams self_similar_params(const BlowupConstants& k, double t);

Grid2D physical_grid(const BlowupConfig& cfg);
ModContext build_context(const BlowupConfig& cfg);

struct InitialState {
  ComplexField u;
  ModParams params;
  BlowupConstants constants;
};

/// Throws PreconditionError when lambda(t_start) < 16 dx or the physical box
/// does not fit the profile box at that scale.
InitialState make_initial_data(const BlowupConfig& cfg, const ModContext& ctx);

struct SeriesRow {
  double t = 0.0;
  long step = 0;
  ModParams params;
  double eps_l2 = 0.0;
  /// ||eps~||_{H^{1/2}}^2 in physical variables.
  double eps_h_half_sq = 0.0;
  double half_norm = 0.0;
  ConservedTriple conserved;
  /// J_A for each configured A.
  std::vector<double> J_A;
  int newton_iterations = 0;
};

struct BlowupSeries {
  std::vector<SeriesRow> rows;
  BlowupConstants constants;
  std::string halt_reason;
  long steps = 0;
  double lambda_floor = 0.0;
  double wall_seconds = 0.0;
  std::vector<double> J_A_widths;
};

/// Raised when a decomposition fails during the run; carries the prefix.
class BlowupError : public std::runtime_error {
 public:
  BlowupError(const std::string& what, BlowupSeries partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const BlowupSeries& partial() const { return partial_; }

 private:
  BlowupSeries partial_;
};

double lambda_floor(const BlowupConfig& cfg);

BlowupSeries run_blowup(const BlowupConfig& cfg, const ModContext& ctx,
                        const std::vector<Observer>& observers = {});
BlowupSeries run_blowup(const BlowupConfig& cfg);

/// Radial cutoff derivative: r on [0,1], 3 - e^{-r} on [2,inf), quintic
/// Hermite in between matching two derivatives at both ends.
double phi_prime(double r);
double phi_second(double r);
/// min phi'' on a uniform grid of (0, r_max).
double phi_convexity_margin(int samples = 20001, double r_max = 4.0);

/// J_A in renormalized variables:
/// (1/lambda) [ 1/2 |D^{1/2} eps|^2 + 1/2 |eps|^2 - int (F(Q_P+eps) - F(Q_P) - F'(Q_P) eps)
///              + (a/2) Im int A grad phi(y/A) . grad eps conj(eps) ],  F(u) = |u|^3/3.
double evaluate_J_A(const ComplexField& eps, const ModParams& m, const ModContext& ctx, double A);

struct OdeRow {
  double t = 0.0;
  double s = 0.0;
  ModParams params;
};

/// Integrates lambda_t = -a, a_t = -a^2/(2 lambda), b_t = -a b/lambda,
/// alpha_t = b, gamma_t = s_t = 1/lambda with a Dormand-Prince stepper.
std::vector<OdeRow> self_similar_ode_reference(const std::vector<double>& t_grid,
                                               const ModParams& init, double tol = 1e-10);

struct FitOptions {
  /// Rows with lambda > lambda(first) * (1 - skip) are left out of the fits.
  double skip_transient = 0.0;
  double min_decrease = 2.0;
};

struct FitReport {
  double lambda_decrease = 0.0;
  double t_first = 0.0;
  double t_last = 0.0;
  /// max |4 A0^2 lambda / t^2 - 1|
  double lambda_law_max = 0.0;
  /// lambda* from lambda ~ lambda* t^2 and 4 A0^2 lambda* - 1.
  double lambda_star = 0.0;
  double lambda_star_dev = 0.0;
  double half_norm_exponent = 0.0;
  /// max |a / sqrt(lambda) - 1/A0|
  double a_law_max = 0.0;
  /// max |b / lambda - B0|
  double b_law_max = 0.0;
  /// max |gamma + 4 A0^2/t - gamma0| - its value at the first row
  double gamma_drift = 0.0;
  /// Over the first half of the window, relative to the ODE started at the first row.
  double ode_lambda_dev = 0.0;
  double ode_a_dev = 0.0;
  double ode_b_dev = 0.0;
  /// max |a_s + a^2/2| / a^2 over the first half.
  double a_s_law = 0.0;
  double mass_drift = 0.0;
  double energy_drift = 0.0;
  double momentum_drift = 0.0;
  /// E(u0)/E0 - 1
  double energy_target_dev = 0.0;
  /// min over rows of J_A / (||eps~||^2_{H^{1/2}} + lambda^2) for every A.
  double J_A_ratio_min = 0.0;
  /// max ||eps~||^2_{H^{1/2}} / lambda
  double eps_lambda_ratio = 0.0;
  bool lambda_monotone = false;
  bool half_norm_monotone = false;
};

/// Throws PreconditionError when lambda decreases by less than min_decrease.
FitReport fit_blowup_laws(const BlowupSeries& series, const FitOptions& opts = {});

nlohmann::json to_json(const FitReport& r);
nlohmann::json to_json(const BlowupConstants& k);
nlohmann::json to_json(const ModParams& m);

/// t, lambda, alpha1, alpha2, gamma, a, b1, b2, eps_l2, eps_h_half_sq,
/// half_norm, M, E, P1, P2, J_A...
void write_series_csv(const std::string& path, const BlowupSeries& s);

}  // namespace halfwave
