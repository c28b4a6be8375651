"""Grid solvers for the evolution driven by the j-th smallest Hessian eigenvalue.

The heavy lifting happens in the compiled extension; this package re-exports
its public surface. Domains are built with ball / ellipsoid /
ball_intersection, payoffs are plain Python callables, and solver results come
back as dicts of node coordinates, interior ids, and value arrays.
"""

from ._eigenflow import (
    Domain,
    __version__,
    ball,
    ball_intersection,
    boundary_envelope_value,
    ellipsoid,
    estimate_principal_eigenvalue,
    run_scenario,
    scenario_names,
    solve_elliptic,
    solve_parabolic,
)

__all__ = [
    "Domain",
    "__version__",
    "ball",
    "ball_intersection",
    "boundary_envelope_value",
    "ellipsoid",
    "estimate_principal_eigenvalue",
    "run_scenario",
    "scenario_names",
    "solve_elliptic",
    "solve_parabolic",
]
