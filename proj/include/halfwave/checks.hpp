#pragma once

#include <array>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "halfwave/experiment.hpp"
#include "halfwave/ground_state.hpp"
#include "halfwave/modulation.hpp"
#include "halfwave/profile.hpp"

namespace halfwave {

struct Check {
  std::string name;
  double value = 0.0;
  /// "<=", ">=", "in" or "holds"
  std::string relation;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

/// Named pass/fail rows. A NaN value never passes.
class CheckTable {
 public:
  explicit CheckTable(std::string title = "") : title_(std::move(title)) {}

  void at_most(const std::string& name, double value, double bound);
  void at_least(const std::string& name, double value, double bound);
  void within(const std::string& name, double value, double lo, double hi);
  void holds(const std::string& name, bool ok,
             double value = std::numeric_limits<double>::quiet_NaN());
  void merge(const CheckTable& other);

  /// True when nonempty and every row passes.
  bool passed() const;
  const std::vector<Check>& checks() const { return rows_; }
  const std::string& title() const { return title_; }

  nlohmann::json to_json() const;
  void print(std::ostream& os) const;

 private:
  std::string title_;
  std::vector<Check> rows_;
};

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct KernelDefects {
  /// ||L- Q|| / ||Q||
  double minus = 0.0;
  /// ||L+ d_j Q|| / ||d_j Q||
  std::array<double, 2> plus{0.0, 0.0};
};

KernelDefects kernel_defects(const GroundState& gs);

/// Relative defects of the commutator identities
///   L- Lambda S10 = -S10 + Lambda Q + (Lambda Q) S10 + Lambda^2 Q
///   L- Lambda S01_j = -S01_j - d_j Q + (Lambda Q) S01_j - Lambda d_j Q
/// measured against ||L- Lambda S||.
struct CommutatorDefects {
  double s10 = 0.0;
  std::array<double, 2> s01{0.0, 0.0};
};

CommutatorDefects commutator_defects(const ProfileSet& ps);

struct ScanRow {
  double x = 0.0;
  double value = 0.0;
};

struct Scan {
  std::vector<ScanRow> rows;
  double slope = 0.0;
};

/// ||Phi_P||_2 over P = (a, 0) and over P = (0, (b, 0)).
Scan residual_scan_a(const ProfileSet& ps, const std::vector<double>& a = {1e-2, 5e-3, 2.5e-3});
Scan residual_scan_b(const ProfileSet& ps, const std::vector<double>& b = {1e-3, 5e-4, 2.5e-4});

struct ExpansionScans {
  /// |int |Q_P|^2 - int Q^2| over a
  Scan mass;
  /// |E(Q_P) - e1 a^2| over a
  Scan energy;
  /// |P(Q_P)_1 - p1 b_1| over b_1
  Scan momentum;
};

ExpansionScans expansion_scans(const ProfileSet& ps,
                               const std::vector<double>& a = {1e-2, 5e-3, 2.5e-3},
                               const std::vector<double>& b = {1e-3, 5e-4, 2.5e-4});

struct RoundTrip {
  ModParams truth;
  ModState state;
  /// Per parameter in the order lambda, alpha1, alpha2, gamma, a, b1, b2.
  std::array<double, 7> rel_error{};
  double max_rel_error = 0.0;
  /// max |sigma_k| / ||u||_2
  double ortho_max = 0.0;
};

/// Synthesizes Q_P under `truth` on a box of half-width lambda * L_window and
/// decomposes it from a perturbed start.
RoundTrip decomposition_round_trip(const ModContext& ctx, const ModParams& truth,
                                   const DecomposeOptions& opts = {});

struct JacobianMatch {
  Jacobian7 numeric{};
  Jacobian7 analytic{};
  /// |J - A| / |A| on nonzero analytic entries, / max|A| elsewhere.
  double max_rel = 0.0;
  int worst_row = 0;
  int worst_col = 0;
};

JacobianMatch jacobian_match(const ModContext& ctx, double h = 1e-5);

struct IntegratorStudy {
  double mass_drift = 0.0;
  /// Round trip of the Strang step without the 2/3 projection.
  double reversal = 0.0;
  /// The same with the projection, which is not invertible.
  double reversal_dealiased = 0.0;
  std::vector<double> dts;
  std::vector<double> energy_drift;
  double energy_order = 0.0;
  double plane_wave = 0.0;
};

/// Gaussian data on (L=8, N=128): 1000 steps of 1e-3 for mass and reversal,
/// dt in {0.04, 0.02, 0.01} to t = 0.4 for the energy drift order.
IntegratorStudy integrator_study(int steps = 1000);

struct CoercivityStudy {
  /// L+ over {Q, S10, S01_1, S01_2}^perp
  double plus = 0.0;
  /// L- over {Q}^perp
  double minus = 0.0;
  double plus_residual = 0.0;
  double minus_residual = 0.0;
};

CoercivityStudy coercivity_study(const ProfileSet& ps, const EigenOptions& opts = {});

/// Criterion tables. Each takes prebuilt artifacts so callers can share them.
CheckTable ground_state_table(const GroundState& gs, const GroundState& doubled, double seconds,
                              double tol = 1e-10);
CheckTable identity_table(const ProfileSet& ps);
CheckTable residual_scan_table(const ProfileSet& ps, const ProfileSet& partner);
CheckTable expansion_table(const ProfileSet& ps);
CheckTable decomposition_table(const ModContext& ctx);
CheckTable integrator_table(const IntegratorStudy& s);
CheckTable blowup_table(const FitReport& fit, const BlowupConstants& k, double seconds);
CheckTable ode_consistency_table(const FitReport& fit);
CheckTable coercivity_table(const CoercivityStudy& fine, const CoercivityStudy& coarse);

}  // namespace halfwave
