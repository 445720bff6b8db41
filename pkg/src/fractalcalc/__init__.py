"""Fractal calculus on self-similar sets and curves.

Functions on a fractal support are handled in staircase coordinates
``u = S(z)``: the local and non-local operators become classical ones in
``u``, evaluated on uniform grids and mapped back through the staircase.
"""

from .fractal_support import (
    CANTOR,
    VON_KOCH,
    Staircase,
    build_curve,
    build_set,
    rise_function,
    staircase_of_set,
)
from .local_calculus import falpha_derivative, falpha_integral, solve_linear_fractal_ode
from .nonlocal_operators import FracOrder, Side, caputo_derivative, rl_derivative, rl_integral
from .staircase_coords import GridFunction, from_grid, to_grid

__all__ = [
    "CANTOR",
    "VON_KOCH",
    "Staircase",
    "build_set",
    "build_curve",
    "staircase_of_set",
    "rise_function",
    "GridFunction",
    "to_grid",
    "from_grid",
    "falpha_derivative",
    "falpha_integral",
    "solve_linear_fractal_ode",
    "FracOrder",
    "Side",
    "rl_integral",
    "rl_derivative",
    "caputo_derivative",
]
