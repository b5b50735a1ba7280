#pragma once

#include <array>
#include <optional>
#include <vector>

#include "halfwave/field.hpp"
#include "halfwave/linops.hpp"
#include "halfwave/profile.hpp"
#include "halfwave/resample.hpp"

namespace halfwave {

/// u(x) = (1/lambda) [Q_P + eps]((x - alpha)/lambda) e^{i gamma}.
struct ModParams {
  double lambda = 1.0;
  std::array<double, 2> alpha{0.0, 0.0};
  double gamma = 0.0;
  double a = 0.0;
  std::array<double, 2> b{0.0, 0.0};

  ProfileParams profile() const { return ProfileParams{a, b}; }
};

struct RhoOptions {
  double tol = 1e-11;
  /// Allowed relative pairing of the rho_2 right-hand side with Q.
  double solvability_tol = 5e-2;
};

/// rho_1 and the P-linear pieces of rho_2 = a rho2a + b . rho2b.
struct RhoBasis {
  RealField rho1;
  RealField rho2a;
  std::array<RealField, 2> rho2b;
  /// <Q, S10 rho1 + Lambda rho1 - 2 T20> / (||Q|| ||rhs||)
  double pairing_a = 0.0;
  std::array<double, 2> pairing_b{0.0, 0.0};
};

struct RhoPair {
  RealField rho1;
  RealField rho2;
};

RhoBasis build_rho_basis(const ProfileSet& ps, const RhoOptions& opts = {});
RhoPair rho_at(const RhoBasis& rb, const ProfileParams& P);
RhoPair build_rho(const ProfileSet& ps, const ProfileParams& P, const RhoOptions& opts = {});

/// Functions paired against eps in the seven orthogonality conditions.
struct TestFunctions {
  ComplexField lambda_q;
  ComplexField da;
  std::array<ComplexField, 2> grad;
  std::array<ComplexField, 2> db;
  RhoPair rho;
};

/// A profile set with Lambda and gradients of every field precomputed, so
/// test functions at any P are cheap linear combinations.
class ModContext {
 public:
  explicit ModContext(ProfileSet ps, const RhoOptions& opts = {});

  const ProfileSet& profiles() const { return ps_; }
  const RhoBasis& rho() const { return rho_; }
  const Grid2D& window() const { return ps_.grid(); }

  ComplexField profile(const ProfileParams& P) const;
  TestFunctions test_functions(const ProfileParams& P) const;

 private:
  struct Derived {
    RealField lam;
    std::array<RealField, 2> grad;
  };
  static Derived derive(const RealField& f);
  const RealField& base(int k) const;

  ProfileSet ps_;
  RhoBasis rho_;
  // Q, T20, T11_1, T11_2, T02_1, T02_2 | S10, S01_1, S01_2, S21_1, S21_2
  std::vector<Derived> derived_;
};

/// Renormalized field v(y) = lambda e^{-i gamma} u(lambda y + alpha) on the
/// window grid. Throws PreconditionError when the window does not fit in
/// the source box or the sampling ratio leaves [ratio_min, ratio_max].
ComplexField renormalize(const AffineSampler& u, const Grid2D& window, const ModParams& m,
                         double ratio_min = 0.5, double ratio_max = 2.0);

/// (1/lambda) Q_P((x - alpha)/lambda) e^{i gamma} on `target`. The target box
/// must map inside the profile box.
ComplexField synthesize(const ModContext& ctx, const ModParams& m, const Grid2D& target);

/// Im <eps, f> = (eps_2, f_1) - (eps_1, f_2).
double skew_pairing(const ComplexField& eps, const ComplexField& f);

/// The seven conditions in the order
/// (Lambda Q_P, d_a Q_P, rho, d_1 Q_P, d_2 Q_P, d_b1 Q_P, d_b2 Q_P),
/// the rho entry being (eps_1, rho_2) - (eps_2, rho_1).
std::array<double, 7> orthogonality(const ComplexField& eps, const TestFunctions& tf);

/// sigma for the physical field w at the trial parameters.
std::array<double, 7> sigma(const AffineSampler& w, const ModParams& trial,
                            const ModContext& ctx);

using Jacobian7 = std::array<std::array<double, 7>, 7>;

/// Central-difference Jacobian of sigma in (lambda, alpha_1, alpha_2, gamma,
/// a, b_1, b_2). Steps are h*lambda for lambda and alpha, h otherwise.
Jacobian7 sigma_jacobian(const AffineSampler& w, const ModParams& trial, const ModContext& ctx,
                         double h = 1e-5);

/// Analytic Jacobian at w = Q, trial = identity, in the same variables.
Jacobian7 base_jacobian(const ModContext& ctx);

struct DecomposeOptions {
  /// max |sigma_k| <= tol * ||u||_2
  double tol = 1e-10;
  int max_iter = 40;
  int max_halvings = 8;
  double fd_step = 1e-5;
  double ratio_min = 0.5;
  double ratio_max = 2.0;
  /// Jacobian from an earlier decomposition, with the lambda and alpha
  /// columns per relative step (see ModState::jacobian). Reused as a chord
  /// until the contraction stalls, then rebuilt by finite differences.
  std::optional<Jacobian7> jacobian;
};

struct ModState {
  ModParams params;
  ComplexField eps;
  std::array<double, 7> ortho{};
  int iterations = 0;
  /// max |sigma| after each accepted Newton step
  std::vector<double> history;
  /// Last Jacobian used, columns 0..2 multiplied by lambda; empty when no
  /// Newton step was needed and none was supplied.
  std::optional<Jacobian7> jacobian;
  int jacobian_builds = 0;
};

ModState decompose(const ComplexField& u, const ModContext& ctx, const ModParams& init,
                   const DecomposeOptions& opts = {});

/// Mass-center, peak-height and peak-phase guess with P = 0.
ModParams cold_start(const ComplexField& u, const ModContext& ctx);

/// Deformed linearized operators; at P = 0 they reduce to L+ eps_1 and L- eps_2.
/// The 1/|Q_P| factors are masked as in the profile construction.
RealField apply_M(Side side, const ComplexField& eps, const ProfileSet& ps, const ProfileParams& P,
                  double q_floor = 1e-8);

struct TimedMod {
  double t = 0.0;
  ModParams params;
  double eps_l2 = 0.0;
};

struct ModRow {
  double t = 0.0;
  double s = 0.0;
  double a_law = 0.0;                     // a_s + a^2/2
  double gamma_tilde = 0.0;               // gamma_s - 1
  double lambda_law = 0.0;                // lambda_s/lambda + a
  std::array<double, 2> alpha_law{0, 0};  // alpha_s/lambda - b
  std::array<double, 2> b_law{0, 0};      // b_s + a b
  double bound = 0.0;                     // lambda^2 + a^4 + |b|^2 + ||eps||_2^2
};

std::vector<ModRow> mod_diagnostics(const std::vector<TimedMod>& series);

}  // namespace halfwave
