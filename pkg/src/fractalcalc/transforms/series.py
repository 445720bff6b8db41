"""Grid functions defined by Mittag-Leffler type power series.

Terms with small exponents (singular or non-smooth at ``u = 0``) are kept as
exact power terms; the rest of the series is summed and sampled.
"""

from __future__ import annotations

import math

import numpy as np

from ..special_functions import DEFAULT_CONTROL, SeriesControl, _ml_series, rgamma
from ..staircase_coords import GridFunction

__all__ = ["ml_power_grid"]


def ml_power_grid(
    a: float,
    eta: float,
    mu: float,
    m: int,
    u_end: float,
    n: int,
    smooth_above: float = 2.0,
    ctl: SeriesControl = DEFAULT_CONTROL,
) -> GridFunction:
    """``u**(eta*m + mu - 1) * E^m_{eta,mu}(a * u**eta)`` on ``[0, u_end]``.

    ``mu`` may be zero or negative; coefficients at gamma poles vanish.
    """
    p0 = eta * m + mu - 1.0
    powers = []
    k = 0
    while p0 + eta * k < smooth_above:
        coef = math.perm(k + m, m) * a**k * rgamma(eta * (k + m) + mu)
        powers.append((coef, p0 + eta * k))
        k += 1
    u = np.linspace(0.0, u_end, n)
    if a == 0.0:
        rest = np.zeros(n)
    else:
        tail = _ml_series(eta, mu, m, a * u**eta, ctl, skip=k)
        rest = a**k * u ** (p0 + eta * k) * tail
    return GridFunction(0.0, u_end / (n - 1), rest, tuple(powers))
