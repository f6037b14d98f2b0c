"""Pseudoharmonic heat flow on Heisenberg nilmanifolds.

The compiled extension carries the whole surface; this package re-exports it.
"""

from ._crflow import (  # noqa: F401
    Grid,
    Map,
    Target,
    comparison_bounds,
    flat_torus,
    gradient_check,
    make_initial_map,
    run_flow,
    spectral_decay,
    threshold_constants,
    unit_sphere,
)
