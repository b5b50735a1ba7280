#pragma once

#include <array>
#include <map>
#include <string>

#include "halfwave/field.hpp"
#include "halfwave/ground_state.hpp"
#include "halfwave/linops.hpp"

namespace halfwave {

/// P = (a, b).
struct ProfileParams {
  double a = 0.0;
  std::array<double, 2> b{0.0, 0.0};

  double b_norm() const;
  /// a^2 + |b|
  double size() const { return a * a + b_norm(); }
};

/// Throws PreconditionError when a^2 + |b| > gate.
void check_gate(const ProfileParams& P, double gate = 0.1);

/// Which O(a^2) right-hand side was kept.
enum class T20Form {
  /// 1/2 S10 - Lambda S10 + 1/2 S10^2
  scaling_minus,
  /// 1/2 S10 + Lambda S10 - 1/2 S10^2
  scaling_plus,
};

const char* t20_form_name(T20Form f);

struct ProfileBuildOptions {
  double tol = 1e-11;
  /// Kernel pairings are recorded in ProfileSet::pairings; this only rejects
  /// right-hand sides that are far from solvable.
  double solvability_tol = 5e-2;
  bool use_parity_sectors = true;
  /// Pointwise 1/Q is replaced by 0 where Q <= q_floor * max Q.
  double q_floor = 1e-8;
};

/// Corrections R_{k,l} = T_{k,l} + i S_{k,l} of the approximate profile.
struct ProfileSet {
  GroundState gs;
  RealField S10;
  std::array<RealField, 2> S01;
  RealField T20;
  std::array<RealField, 2> T11;
  std::array<RealField, 2> T02;
  std::array<RealField, 2> S21;
  double e1 = 0.0;
  double p1 = 0.0;
  /// p1 evaluated separately for each axis.
  std::array<double, 2> p1_axis{0.0, 0.0};

  T20Form t20_form = T20Form::scaling_minus;
  /// |<S10,S10> + 2<T20,Q>| / <S10,S10> for both candidate forms.
  std::map<std::string, double> t20_defects;
  /// Relative kernel pairing of each right-hand side, keyed by order.
  std::map<std::string, double> pairings;
  /// Relative residual of each solve, keyed by order.
  std::map<std::string, double> solve_residuals;
  /// Largest share of a right-hand side's L2 norm removed by the 1/Q mask.
  double masked_fraction = 0.0;

  const Grid2D& grid() const { return gs.grid(); }
};

ProfileSet build_profile_set(const GroundState& gs, const ProfileBuildOptions& opts = {});

/// f / Q where Q > floor * max Q, 0 elsewhere; reports the L2 share dropped.
RealField divide_by_profile(const RealField& f, const RealField& Q, double floor,
                            double* masked_fraction = nullptr);

/// Q_P truncated after the a^2 b S21 term.
ComplexField assemble_profile(const ProfileSet& ps, const ProfileParams& P, double gate = 0.1);
/// dQ_P / da from the polynomial ansatz.
ComplexField profile_da(const ProfileSet& ps, const ProfileParams& P);
/// dQ_P / db_j from the polynomial ansatz.
ComplexField profile_db(const ProfileSet& ps, const ProfileParams& P, int j);

struct ResidualReport {
  ComplexField Phi;
  double l2_norm = 0.0;
  double h1_norm = 0.0;
  ProfileParams params;
};

/// Phi_P = -[ -i a^2/2 dQ_P/da - i a b.dQ_P/db - DQ_P - Q_P + i a Lambda Q_P
///            - i b.grad Q_P + |Q_P| Q_P ].
ResidualReport profile_residual(const ProfileSet& ps, const ProfileParams& P, double gate = 0.1);

struct ExpansionRecord {
  /// int |Q_P|^2 - int Q^2
  double mass_dev = 0.0;
  /// E(Q_P) - e1 a^2
  double energy_dev = 0.0;
  /// P(Q_P) - p1 b
  std::array<double, 2> momentum_dev{0.0, 0.0};
};

ExpansionRecord expansion_check(const ProfileSet& ps, const ProfileParams& P, double gate = 0.1);

}  // namespace halfwave
