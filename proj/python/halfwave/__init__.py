"""Python front end for the halfwave C++ core.

Fields are square numpy arrays indexed [i, j] with x = (-L + i dx, -L + j dx).
Modulation parameters are dicts with keys lambda, alpha, gamma, a, b.
"""

from ._core import (
    ConvergenceError,
    Context,
    PreconditionError,
    Profiles,
    build_profiles,
    coercivity_checks,
    coordinates,
    decompose,
    decomposition_checks,
    expansion_checks,
    functionals,
    ground_state,
    identity_checks,
    integrator_study,
    ode_reference,
    residual_scan_checks,
    run_blowup,
    self_similar_params,
    step,
    synthesize,
)

__all__ = [
    "ConvergenceError",
    "Context",
    "PreconditionError",
    "Profiles",
    "build_profiles",
    "coercivity_checks",
    "coordinates",
    "decompose",
    "decomposition_checks",
    "expansion_checks",
    "functionals",
    "ground_state",
    "identity_checks",
    "integrator_study",
    "ode_reference",
    "residual_scan_checks",
    "run_blowup",
    "self_similar_params",
    "step",
    "synthesize",
]
