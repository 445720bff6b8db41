"""Closed-form solution of ``D^beta y - lambda*y = h`` with non-local initial data.

With ``[D^(beta-k) y](0) = c_k`` for ``k = 1..n`` the solution is

    y = sum_k c_k u^(beta-k) E_{beta,beta-k+1}(lambda u^beta)
        + int_0^u (u-t)^(beta-1) E_{beta,beta}(lambda (u-t)^beta) h(t) dt.

The forcing integral is the series ``sum_j lambda^j I^(beta(j+1)) h``; its
product-trapezoid weights are summed over ``j`` first, so the whole particular
solution is a single convolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConvergenceError, GridError, OrderError
from ..nonlocal_operators import FracOrder, abel_weights, rl_derivative
from ..reporting import CheckResult
from ..special_functions import DEFAULT_CONTROL, SeriesControl, rgamma
from ..staircase_coords import GridFunction
from .laplace import KOCH_ALPHA
from .series import ml_power_grid

__all__ = ["solve_nonlocal_ode", "nonlocal_ode_residual", "NonlocalOdeConfig", "nonlocal_ode_suite"]


def _ml_kernel_integral(h: GridFunction, beta: float, lam: float, ctl: SeriesControl) -> np.ndarray:
    N, du = h.n, h.du
    c_sum = np.zeros(N)
    a_sum = np.zeros(N)
    quiet = 0
    for j in range(ctl.max_terms):
        order = beta * (j + 1)
        scale = lam**j * du**order * rgamma(order + 2.0)
        c, A = abel_weights(order, N)
        tc, ta = scale * c, scale * A
        c_sum += tc
        a_sum += ta
        big = max(np.max(np.abs(c_sum)), np.max(np.abs(a_sum)))
        small = max(np.max(np.abs(tc)), np.max(np.abs(ta))) <= ctl.rel_tol * big
        quiet = quiet + 1 if small else 0
        if quiet >= 2 or lam == 0:
            break
    else:
        raise ConvergenceError("kernel series did not converge")
    s = h.samples
    out = np.zeros(N)
    out[1:] = a_sum[1:] * s[0] + np.convolve(c_sum, s[1:])[: N - 1]
    return out


def solve_nonlocal_ode(
    order: FracOrder,
    lam: float,
    c,
    h: GridFunction | None = None,
    u_max: float = 5.0,
    n: int = 4096,
    ctl: SeriesControl = DEFAULT_CONTROL,
) -> GridFunction:
    """Sample the closed-form solution on ``[0, u_max]``.

    ``c`` must have ``order.n`` entries. ``h`` (sample-only, on the same grid)
    defaults to zero. Singular homogeneous terms are kept as power terms.
    """
    beta = order.beta
    c = tuple(float(x) for x in c)
    if len(c) != order.n:
        raise OrderError(f"need {order.n} initial values, got {len(c)}")
    y = GridFunction(0.0, u_max / (n - 1), np.zeros(n))
    for k, ck in enumerate(c, start=1):
        if ck != 0:
            y = y + ck * ml_power_grid(lam, beta, beta - k + 1, 0, u_max, n, ctl=ctl)
    if h is not None:
        if h.powers:
            raise GridError("the forcing term must be sample-only")
        if h.n != n or abs(h.u0) > 0 or abs(h.u_end - u_max) > 1e-12 * u_max:
            raise GridError("the forcing term must live on the solution grid")
        y = y + GridFunction(0.0, y.du, _ml_kernel_integral(h, beta, lam, ctl))
    return y


def nonlocal_ode_residual(y: GridFunction, order: FracOrder, lam: float, h: GridFunction | None, u_lo: float = 0.1) -> float:
    """``sup |D^beta y - lambda*y - h|`` over nodes with ``u >= u_lo``."""
    with np.errstate(invalid="ignore"):  # inf - inf at the singular node u = 0
        r = rl_derivative(y, order).values() - lam * y.values()
    if h is not None:
        r = r - h.values()
    keep = y.nodes >= u_lo
    return float(np.max(np.abs(r[keep])))


@dataclass(frozen=True)
class NonlocalOdeConfig:
    alpha: float = KOCH_ALPHA
    cases: tuple[tuple[float, float], ...] = ((0.6, 0.5), (0.5, -1.0))
    forcings: tuple[float, ...] = (0.0, 1.0)
    c1: float = 1.0
    u_max: float = 5.0
    grid_n: int = 4096
    u_lo: float = 0.1
    tol: float = 5e-3


def nonlocal_ode_suite(cfg: NonlocalOdeConfig = NonlocalOdeConfig()) -> list[CheckResult]:
    out = []
    for beta, lam in cfg.cases:
        order = FracOrder(cfg.alpha, beta)
        c = (cfg.c1,) + (0.0,) * (order.n - 1)
        for hv in cfg.forcings:
            h = None if hv == 0 else GridFunction.from_function(lambda u: np.full_like(u, hv), 0.0, cfg.u_max, cfg.grid_n)
            y = solve_nonlocal_ode(order, lam, c, h, cfg.u_max, cfg.grid_n)
            res = nonlocal_ode_residual(y, order, lam, h, cfg.u_lo)
            params = {"beta": beta, "lambda": lam, "h": hv, "c": list(c)}
            out.append(CheckResult("nonlocal-ode-residual", res, cfg.tol, params, point=cfg.u_lo))
    return out
