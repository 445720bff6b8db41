"""Fractal Laplace transform in staircase coordinates.

``F(us) = int_0^inf exp(-us*u) g(u) du`` with ``us = J(s)``. The sampled part
of ``g`` is integrated exactly against the exponential cell by cell (g
piecewise linear); power terms ``c*u**p`` are integrated exactly against the
piecewise-linear interpolant of the exponential. Both are second-order
quadratures, so a closed form is never used to evaluate its own check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import OrderError, PoleError, TruncationError
from ..nonlocal_operators import FracOrder, caputo_derivative, rl_derivative, rl_integral
from ..reporting import CheckResult
from ..staircase_coords import GridFunction
from .policy import TruncationPolicy
from .series import ml_power_grid

__all__ = [
    "LaplaceValue",
    "Table2Config",
    "LaplaceIdentityConfig",
    "fractal_laplace",
    "table2_cases",
    "verify_table2",
    "laplace_rl_identity_check",
    "laplace_identity_suite",
]

KOCH_ALPHA = math.log(4) / math.log(3)


@dataclass(frozen=True)
class LaplaceValue:
    value: float
    tail_bound: float

    def __float__(self):
        return self.value


def _cell_weights(x: float) -> tuple[float, float]:
    """``int_0^1 exp(-x t) (1-t) dt`` and ``int_0^1 exp(-x t) t dt``."""
    if x < 1e-3:
        return 0.5 - x / 6 + x * x / 24, 0.5 - x / 3 + x * x / 8
    em = math.expm1(-x)
    return (x + em) / (x * x), (-em - x * math.exp(-x)) / (x * x)


def _sample_part(g: GridFunction, us: float) -> float:
    h = g.du
    w0, w1 = _cell_weights(us * h)
    decay = np.exp(-us * g.nodes[:-1])
    s = g.samples
    return float(h * np.sum(decay * (w0 * s[:-1] + w1 * s[1:])))


def _power_part(g: GridFunction, us: float) -> float:
    x = g.nodes - g.u0
    e = np.exp(-us * g.nodes)
    h = g.du
    total = 0.0
    for c, p in g.powers:
        if not p > -1:
            raise TruncationError(f"power term u^{p} is not integrable at 0")
        P0 = x ** (p + 1) / (p + 1)
        P1 = x ** (p + 2) / (p + 2)
        M0 = np.diff(P0)
        M1 = np.diff(P1)
        # exponential replaced by its linear interpolant on each cell
        left = x[1:] * M0 - M1
        right = M1 - x[:-1] * M0
        total += c * float(np.sum(e[:-1] * left + e[1:] * right)) / h
    return total


def fractal_laplace(g: GridFunction, us: float, trunc: TruncationPolicy = TruncationPolicy()) -> LaplaceValue:
    """Laplace transform of ``g`` at ``us`` over the grid of ``g``.

    The neglected tail beyond the last node is bounded by
    ``exp(-us*u_end) * max|g|``; a ``TruncationError`` is raised when this
    exceeds ``trunc.tail_tol``.
    """
    if not us > 0:
        raise PoleError(f"us must be positive, got {us}")
    vals = g.values()
    finite = vals[np.isfinite(vals)]
    bound = math.exp(-us * g.u_end) * float(np.max(np.abs(finite)))
    if bound > trunc.tail_tol:
        raise TruncationError(f"tail bound {bound:.3g} exceeds {trunc.tail_tol:g}")
    value = _sample_part(g, us) + _power_part(g, us)
    return LaplaceValue(value, bound)


# --- transform table -------------------------------------------------------


@dataclass(frozen=True)
class Table2Config:
    beta: float = 0.6
    a: float = 0.5
    nu: float = 0.8
    eta: float = 0.8
    mu: float = 1.0
    ms: tuple[int, ...] = (0, 1, 2)
    us: tuple[float, ...] = tuple(np.linspace(1.5, 4.0, 11))
    u_max: float = 60.0
    grid_n: int = 2**14
    tol: float = 1e-3


@dataclass(frozen=True)
class _Case:
    name: str
    params: dict
    build: object
    closed: object
    # pole avoidance: us**eta must exceed pole_a
    eta: float = 1.0
    pole_a: float = 0.0


def table2_cases(cfg: Table2Config = Table2Config()) -> list[_Case]:
    """Each row as a generic ``u**(eta*m+mu-1) E^m_{eta,mu}(a u**eta)`` builder plus its closed form."""
    b, a, nu, eta, mu = cfg.beta, cfg.a, cfg.nu, cfg.eta, cfg.mu
    U, n = cfg.u_max, cfg.grid_n

    def grid(aa, e, m_, mm):
        return lambda: ml_power_grid(aa, e, m_, mm, U, n)

    cases = [
        _Case("table2-row1", {"beta": b}, grid(0.0, b, b, 0), lambda s: s**-b),
        _Case("table2-row2", {"beta": b, "a": a}, grid(a, b, b, 0), lambda s: 1 / (s**b - a), b, a),
        _Case("table2-row3", {"beta": b, "a": a}, grid(-a, b, 1.0, 0), lambda s: s**b / (s * (s**b + a))),
        _Case(
            "table2-row4",
            {"beta": b, "a": a},
            lambda: 1.0 - ml_power_grid(-a, b, 1.0, 0, U, n),
            lambda s: a / (s * (s**b + a)),
        ),
        _Case("table2-row5", {"beta": b, "a": a}, grid(a, 1.0, b + 1, 0), lambda s: 1 / (s**b * (s - a)), 1.0, a),
        _Case("table2-row6", {"beta": b, "nu": nu, "a": a}, grid(a, nu, b, 0), lambda s: s ** (nu - b) / (s**nu - a), nu, a),
    ]
    for m in cfg.ms:
        cases.append(
            _Case(
                "table2-row7",
                {"eta": eta, "mu": mu, "a": a, "m": m},
                grid(a, eta, mu, m),
                lambda s, m=m: math.factorial(m) * s ** (eta - mu) / (s**eta - a) ** (m + 1),
                eta,
                a,
            )
        )
    return cases


def verify_table2(cfg: Table2Config = Table2Config()) -> list[CheckResult]:
    trunc = TruncationPolicy(u_max=cfg.u_max)
    out = []
    for case in table2_cases(cfg):
        bad = [s for s in cfg.us if s**case.eta <= case.pole_a]
        if bad:
            raise PoleError(f"{case.name}: us^eta <= a at us={bad[0]}")
        g = case.build()
        for s in cfg.us:
            lhs = fractal_laplace(g, s, trunc).value
            rhs = case.closed(s)
            err = abs(lhs - rhs) / abs(rhs)
            out.append(CheckResult(case.name, err, cfg.tol, case.params, point=s, lhs=lhs, rhs=rhs))
    return out


# --- operator identities ------------------------------------------------------


def laplace_rl_identity_check(
    g: GridFunction,
    order: FracOrder,
    us,
    initial_rl: float = 0.0,
    initial_caputo: tuple[float, ...] = (),
    trunc: TruncationPolicy = TruncationPolicy(),
    tol: float = 1e-3,
    erratum_gap: float = 0.1,
    params: dict | None = None,
) -> list[CheckResult]:
    """Check the transform rules for the RL integral, RL derivative and Caputo derivative.

    ``us`` is a point or a sequence of points. ``initial_rl`` holds
    ``[D^(beta-1) g](0)`` (the only term when n = 1) and ``initial_caputo``
    the values ``[D^k g](0)`` for ``k < n``; callers take them from the
    power-rule closed forms. Residuals are relative to
    ``max(|rhs|, |us**beta F|)``. The integral rule is reported for both the
    exponent ``-beta`` and the printed ``+beta``; the latter is expected to
    miss by more than ``erratum_gap``.
    """
    b = order.beta
    params = dict(params or {}, beta=b)
    d_rl = rl_derivative(g, order)
    d_c = caputo_derivative(g, order)
    i_rl = rl_integral(g, order)
    out = []
    for s in np.atleast_1d(us):
        s = float(s)
        F = fractal_laplace(g, s, trunc).value
        scale_f = abs(s**b * F)

        def resid(lhs, rhs):
            return abs(lhs - rhs) / max(abs(rhs), scale_f)

        lhs = fractal_laplace(d_rl, s, trunc).value
        rhs = s**b * F - initial_rl
        out.append(CheckResult("laplace-rl-derivative", resid(lhs, rhs), tol, params, point=s, lhs=lhs, rhs=rhs))

        lhs = fractal_laplace(d_c, s, trunc).value
        rhs = s**b * F - sum(s ** (b - k - 1) * d for k, d in enumerate(initial_caputo))
        out.append(CheckResult("laplace-caputo", resid(lhs, rhs), tol, params, point=s, lhs=lhs, rhs=rhs))

        lhs = fractal_laplace(i_rl, s, trunc).value
        rhs = s**-b * F
        printed = s**b * F
        printed_err = abs(lhs - printed) / max(abs(printed), scale_f)
        out.append(
            CheckResult(
                "laplace-rl-integral", resid(lhs, rhs), tol, params, point=s, lhs=lhs, rhs=rhs, variant_error=printed_err
            )
        )
        out.append(
            CheckResult(
                "laplace-rl-integral-printed",
                printed_err,
                erratum_gap,
                params,
                erratum=True,
                point=s,
                lhs=lhs,
                rhs=printed,
                note="printed exponent +beta",
            )
        )
    return out


@dataclass(frozen=True)
class LaplaceIdentityConfig:
    alpha: float = KOCH_ALPHA
    betas: tuple[float, ...] = (0.5, 0.75)
    ms: tuple[int, ...] = (0, 1, 2)
    us: tuple[float, ...] = tuple(np.linspace(1.5, 4.0, 6))
    u_max: float = 60.0
    grid_n: int = 2**14
    tol: float = 1e-3
    erratum_gap: float = 0.1


def laplace_identity_suite(cfg: LaplaceIdentityConfig = LaplaceIdentityConfig()) -> list[CheckResult]:
    """Identities on ``g = u**m``; initial terms from the power rule.

    For ``n = 1``: ``[I^(1-beta) u^m](0) = 0`` and ``[u^m](0) = 1`` only for ``m = 0``.
    """
    out = []
    for beta in cfg.betas:
        order = FracOrder(cfg.alpha, beta)
        if order.n != 1:
            raise OrderError("the identity suite covers the n = 1 window")
        for m in cfg.ms:
            g = GridFunction.from_function(lambda u: u**m, 0.0, cfg.u_max, cfg.grid_n)
            out += laplace_rl_identity_check(
                g,
                order,
                cfg.us,
                initial_rl=0.0,
                initial_caputo=(1.0 if m == 0 else 0.0,),
                trunc=TruncationPolicy(u_max=cfg.u_max),
                tol=cfg.tol,
                erratum_gap=cfg.erratum_gap,
                params={"m": m},
            )
    return out
