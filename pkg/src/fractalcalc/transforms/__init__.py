"""Laplace and Mellin transforms in staircase coordinates, and the non-local ODE solver."""

from .laplace import fractal_laplace, laplace_identity_suite, laplace_rl_identity_check, verify_table2
from .mellin import fractal_mellin, fractal_mellin_many, mellin_identity_suite, mellin_ode_example_check
from .nonlocal_ode import solve_nonlocal_ode
from .policy import TruncationPolicy

__all__ = [
    "TruncationPolicy",
    "fractal_laplace",
    "verify_table2",
    "laplace_rl_identity_check",
    "laplace_identity_suite",
    "fractal_mellin",
    "fractal_mellin_many",
    "mellin_identity_suite",
    "mellin_ode_example_check",
    "solve_nonlocal_ode",
]
