#pragma once

#include "halfwave/ground_state.hpp"
#include "halfwave/modulation.hpp"
#include "halfwave/profile.hpp"

namespace fixtures {

// Coarse (L=8, N=256) objects shared across test cases.
inline const halfwave::GroundState& small_gs() {
  static const halfwave::GroundState gs =
      halfwave::solve_ground_state(halfwave::make_grid(8.0, 256), 1e-11, 3000);
  return gs;
}

inline const halfwave::ProfileSet& small_ps() {
  static const halfwave::ProfileSet ps = halfwave::build_profile_set(small_gs());
  return ps;
}

inline const halfwave::ModContext& small_ctx() {
  static const halfwave::ModContext ctx(small_ps());
  return ctx;
}

}  // namespace fixtures
