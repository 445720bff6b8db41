"""Real-argument gamma, beta and Mittag-Leffler functions.

The Mittag-Leffler family is evaluated by its defining power series only; there
is no asymptotic branch, so arguments are capped by :class:`SeriesControl`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, PoleError

__all__ = [
    "SeriesControl",
    "DEFAULT_CONTROL",
    "gamma",
    "rgamma",
    "beta",
    "mittag_leffler",
    "mittag_leffler_m",
]

_POLE_ATOL = 1e-12
# beyond this argument math.gamma overflows
_GAMMA_MAX = 170.0
# largest exponent (natural log) used for direct term evaluation
_LOG_SAFE = 650.0


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the Mittag-Leffler series."""

    rel_tol: float = 1e-14
    max_terms: int = 2000
    arg_cap: float = 50.0

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")
        if not self.arg_cap > 0:
            raise ValueError("arg_cap must be positive")


DEFAULT_CONTROL = SeriesControl()


def _is_pole(x: float) -> bool:
    return x <= 0 and abs(x - round(x)) <= _POLE_ATOL


def gamma(x: float) -> float:
    """Gamma function for real ``x``; reflection is used for negative arguments."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"gamma argument must be finite, got {x}")
    if _is_pole(x):
        raise PoleError(f"gamma has a pole at {x}")
    if x > 0:
        return math.gamma(x)
    # Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return math.pi / (math.sin(math.pi * x) * math.gamma(1.0 - x))


def rgamma(x: float) -> float:
    """Reciprocal gamma ``1/Gamma(x)``, an entire function (zero at the poles)."""
    x = float(x)
    if _is_pole(x):
        return 0.0
    if x > _GAMMA_MAX:
        return math.exp(-math.lgamma(x))
    return 1.0 / gamma(x)


def beta(x: float, v: float) -> float:
    """Beta function ``B(x, v) = Gamma(x) Gamma(v) / Gamma(x + v)`` for positive arguments."""
    if not (x > 0 and v > 0):
        raise DomainError(f"beta requires positive arguments, got ({x}, {v})")
    s = x + v
    if s < _GAMMA_MAX:
        return math.gamma(x) * math.gamma(v) / math.gamma(s)
    return math.exp(math.lgamma(x) + math.lgamma(v) - math.lgamma(s))


def _ml_series(eta, mu, m, x, ctl=DEFAULT_CONTROL, skip=0):
    """Sum ``sum_{k >= skip} (k+m)!/k! x**(k-skip) / Gamma(eta*(k+m) + mu)``.

    No checks on ``mu``: negative values are allowed and poles of the gamma
    function make the corresponding coefficient vanish.
    """
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    if np.any(np.abs(xa) > ctl.arg_cap):
        raise DomainError(f"|x| exceeds arg_cap={ctl.arg_cap}")

    total = np.zeros_like(xa)
    peak = np.zeros_like(xa)
    quiet = np.zeros(xa.shape, dtype=int)
    with np.errstate(divide="ignore"):
        logx = np.log(np.abs(xa))
    max_logx = float(np.max(logx)) if xa.size else -np.inf
    neg = xa < 0

    converged = False
    for j in range(ctl.max_terms):
        k = j + skip
        arg = eta * (k + m) + mu
        if _is_pole(arg):
            continue
        if arg < _GAMMA_MAX and j * max_logx < _LOG_SAFE:
            coef = math.perm(k + m, m) * rgamma(arg)
            term = coef * xa**j
        else:
            logc = (math.lgamma(k + m + 1) - math.lgamma(k + 1)) - math.lgamma(arg)
            sign_c = 1.0 if arg > 0 else math.copysign(1.0, gamma(arg))
            with np.errstate(invalid="ignore", over="ignore"):
                mag = np.exp(logc + j * logx) if j else np.full_like(xa, math.exp(logc))
            term = sign_c * np.where(neg & (j % 2 == 1), -mag, mag)
        total += term
        peak = np.maximum(peak, np.abs(term))
        small = np.abs(term) <= ctl.rel_tol * np.abs(total)
        quiet = np.where(small, quiet + 1, 0)
        if np.all(quiet >= 2):
            converged = True
            break
    if not converged:
        raise ConvergenceError(
            f"Mittag-Leffler series did not converge in {ctl.max_terms} terms"
        )
    with np.errstate(divide="ignore", invalid="ignore"):
        lost = peak * np.finfo(float).eps / np.abs(total)
    if np.any(lost > 1e-6):
        warnings.warn(
            "Mittag-Leffler series lost more than 1e-6 relative accuracy to cancellation",
            RuntimeWarning,
            stacklevel=3,
        )
    return float(total[0]) if scalar else total


def _check_params(eta, mu):
    if not eta > 0:
        raise DomainError(f"eta must be positive, got {eta}")
    if not mu > 0:
        raise DomainError(f"mu must be positive, got {mu}")


def mittag_leffler(eta, mu, x, ctl: SeriesControl = DEFAULT_CONTROL):
    """Two-parameter Mittag-Leffler function ``E_{eta,mu}(x)``.

    ``mu = 1`` gives the one-parameter function. ``x`` may be a scalar or an
    array; the series stops once two consecutive terms fall below
    ``ctl.rel_tol`` times the running sum.
    """
    _check_params(eta, mu)
    return _ml_series(eta, mu, 0, x, ctl)


def mittag_leffler_m(eta, mu, m: int, x, ctl: SeriesControl = DEFAULT_CONTROL, skip: int = 0):
    """Three-parameter function ``E^m_{eta,mu}(x) = sum (k+m)!/k! x^k / Gamma(eta k + eta m + mu)``.

    With ``skip = K`` the first ``K`` terms are dropped and the remaining
    series is returned divided by ``x**K``, which is what is needed to split
    a singular leading part off a power-series function.
    """
    _check_params(eta, mu)
    if m < 0 or int(m) != m:
        raise DomainError(f"m must be a non-negative integer, got {m}")
    if skip < 0:
        raise DomainError("skip must be non-negative")
    return _ml_series(eta, mu, int(m), x, ctl, skip=int(skip))
