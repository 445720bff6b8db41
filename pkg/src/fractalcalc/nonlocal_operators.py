"""Riemann-Liouville and Caputo F^alpha-operators in staircase coordinates.

In ``u = S(z)`` the left-sided integral of order ``beta`` is the classical
Abel integral ``(1/Gamma(beta)) int_{u0}^{u} (u - w)**(beta - 1) g(w) dw``.
It is evaluated by product-trapezoid quadrature: ``g`` is taken piecewise
linear and the kernel is integrated exactly on each cell. On a uniform grid
the weights depend only on index differences, so the whole integral is one
discrete convolution.

Derivatives compose the integral with central differences as the printed
definitions do. Before that, the polynomial through the first ``n + 1``
samples is split off and mapped exactly by the power rule; the remainder
vanishes to order ``n + 1`` at the left end, which is what keeps the
composition accurate next to ``u0``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import GridError, OrderError, SingularGridError
from .special_functions import gamma, rgamma
from .staircase_coords import GridFunction

__all__ = [
    "Side",
    "FracOrder",
    "rl_integral",
    "rl_derivative",
    "caputo_derivative",
    "abel_weights",
]


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class FracOrder:
    """Operator order ``beta`` on a support of order ``alpha``.

    ``n`` is the integer with ``(n-1)*alpha <= beta < n*alpha``.
    """

    alpha: float
    beta: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise OrderError(f"alpha must be positive, got {self.alpha}")
        if not (self.beta >= 0 and math.isfinite(self.beta)):
            raise OrderError(f"beta must be finite and non-negative, got {self.beta}")

    @property
    def n(self) -> int:
        n = math.floor(self.beta / self.alpha) + 1
        # guard against beta/alpha landing a rounding error below an integer
        if self.beta >= n * self.alpha:
            n += 1
        return n


def abel_weights(beta: float, size: int) -> tuple[np.ndarray, np.ndarray]:
    """Product-trapezoid weights for the Abel integral of order ``beta``.

    With ``h`` the spacing, the integral at node ``j`` is
    ``h**beta / Gamma(beta + 2) * (A[j]*g[0] + sum_{k=1..j} c[j-k]*g[k])``.
    Both arrays are written with ``expm1``/``log1p`` so that the second
    differences of ``m**(beta+1)`` keep their digits for large ``m``.
    """
    p = beta + 1.0
    m = np.arange(1, size, dtype=float)
    c = np.empty(size)
    c[0] = 1.0
    with np.errstate(divide="ignore"):  # log1p(-1) = -inf at m = 1 is intended
        c[1:] = m**p * (np.expm1(p * np.log1p(1.0 / m)) + np.expm1(p * np.log1p(-1.0 / m)))
    A = np.zeros(size)
    if size > 1:
        A[1] = beta
    if size > 2:
        j = m[1:]
        A[2:] = j**p * (np.expm1(p * np.log1p(-1.0 / j)) + p / j)
    return c, A


def _abel_samples(samples: np.ndarray, h: float, beta: float) -> np.ndarray:
    """Product-trapezoid Abel integral of piecewise-linear samples."""
    N = len(samples)
    c, A = abel_weights(beta, N)
    out = np.zeros(N)
    out[1:] = A[1:] * samples[0] + np.convolve(c, samples[1:])[: N - 1]
    return out * (h**beta * rgamma(beta + 2.0))


def _power_rule(coef: float, p: float, order: float) -> tuple[float, float]:
    """``I^order (u-u0)^p = Gamma(p+1)/Gamma(p+order+1) (u-u0)^(p+order)``.

    A negative ``order`` gives the derivative; ``rgamma`` makes the
    coefficient vanish where the classical result is zero.
    """
    return coef * gamma(p + 1.0) * rgamma(p + order + 1.0), p + order


def _require_integrable(g: GridFunction):
    if not g.integrable:
        raise SingularGridError("grid function has a power term with exponent <= -1")


def _polynomial_head(g: GridFunction, degree: int) -> np.ndarray:
    """Coefficients ``a_k`` of the interpolant through the first ``degree+1`` samples in ``x = u - u0``."""
    x = np.arange(degree + 1, dtype=float) * g.du
    V = np.vander(x, degree + 1, increasing=True)
    return np.linalg.solve(V, g.samples[: degree + 1])


def _mirrored(op, g: GridFunction, *args) -> GridFunction:
    """Right-sided operator as the left-sided one conjugated by ``u -> U - u``."""
    if g.powers:
        raise GridError("right-sided operators take sample-only grid functions")
    flipped = g.with_samples(g.samples[::-1])
    res = op(flipped, *args)
    # singular left-end terms of the mirrored result sit at the right end here
    return GridFunction(g.u0, g.du, res.values()[::-1])


def _left_integral(g: GridFunction, beta: float) -> GridFunction:
    _require_integrable(g)
    powers = [_power_rule(c, p, beta) for c, p in g.powers]
    # linear head integrated exactly, remainder starts with two zeros
    a = _polynomial_head(g, 1)
    powers += [_power_rule(a[k], float(k), beta) for k in range(2)]
    rest = g.samples - (a[0] + a[1] * (g.nodes - g.u0))
    rest[:2] = 0.0
    return GridFunction(g.u0, g.du, _abel_samples(rest, g.du, beta), tuple(powers))


def rl_integral(g: GridFunction, order: FracOrder, side: Side = Side.LEFT) -> GridFunction:
    """Riemann-Liouville F^alpha-integral of order ``order.beta``.

    Left: integrates from the left end of the grid. Right: integrates up to
    the right end; implemented as the mirror image of the left operator.
    """
    if not order.beta > 0:
        raise OrderError("the integral needs beta > 0")
    if side is Side.RIGHT:
        return _mirrored(_left_integral, g, order.beta)
    return _left_integral(g, order.beta)


def _stencil(offsets: np.ndarray, order: int) -> np.ndarray:
    """Finite-difference weights for the ``order``-th derivative at offset 0 (unit spacing)."""
    m = len(offsets)
    V = np.vander(offsets.astype(float), m, increasing=True).T
    rhs = np.zeros(m)
    rhs[order] = math.factorial(order)
    return np.linalg.solve(V, rhs)


def _differentiate(samples: np.ndarray, h: float, times: int) -> np.ndarray:
    """``times``-th derivative in one stencil, second order at every node.

    Iterating a first-derivative rule with one-sided ends amplifies the end
    error by ``1/h`` per pass, so higher orders use a single stencil:
    centred inside, ``times + 2`` one-sided points near each end.
    """
    if times == 0:
        return samples
    if times == 1:
        return np.gradient(samples, h, edge_order=2)
    N = len(samples)
    k = (times + 1) // 2
    if N < times + 2:
        raise GridError(f"need at least {times + 2} samples for a derivative of order {times}")
    out = np.empty(N)
    centre = _stencil(np.arange(-k, k + 1), times)
    out[k : N - k] = np.convolve(samples, centre[::-1], mode="valid")
    width = times + 2
    for i in range(k):
        out[i] = _stencil(np.arange(width) - i, times) @ samples[:width]
        j = N - 1 - i
        out[j] = _stencil(np.arange(N - width, N) - j, times) @ samples[N - width :]
    return out / h**times


def _left_rl_derivative(g: GridFunction, beta: float, n: int) -> GridFunction:
    if beta == 0:
        return g
    if n - beta <= 0:
        raise SingularGridError(f"kernel exponent {n - beta - 1} <= -1 for beta={beta}, n={n}")
    if g.n < n + 3:
        raise GridError(f"need at least {n + 3} samples")
    _require_integrable(g)
    powers = [_power_rule(c, p, -beta) for c, p in g.powers]
    a = _polynomial_head(g, n)
    powers += [_power_rule(a[k], float(k), -beta) for k in range(n + 1)]
    x = g.nodes - g.u0
    rest = g.samples - np.polynomial.polynomial.polyval(x, a)
    rest[: n + 1] = 0.0
    inner = _abel_samples(rest, g.du, n - beta)
    return GridFunction(g.u0, g.du, _differentiate(inner, g.du, n), tuple(powers))


def rl_derivative(g: GridFunction, order: FracOrder, side: Side = Side.LEFT) -> GridFunction:
    """Riemann-Liouville F^alpha-derivative: ``n`` derivatives of the order ``n - beta`` integral.

    Singular terms of the result at the left end (such as ``u**(-beta)``
    for a constant) are carried as exact power terms. For ``Side.RIGHT``
    the ``(-D)**n`` of the definition is absorbed by the mirror map.

    Samples should be smooth at ``u0``: a non-smooth start such as a sampled
    ``sqrt(u)`` makes the polynomial head ill-conditioned. Pass such
    behaviour as power terms instead.
    """
    if side is Side.RIGHT:
        return _mirrored(_left_rl_derivative, g, order.beta, order.n)
    return _left_rl_derivative(g, order.beta, order.n)


def _left_caputo(g: GridFunction, beta: float, n: int) -> GridFunction:
    if g.powers:
        raise GridError("the Caputo derivative takes sample-only grid functions")
    if beta == 0:
        return g
    if n - beta <= 0:
        raise SingularGridError(f"kernel exponent {n - beta - 1} <= -1 for beta={beta}, n={n}")
    if g.n < 3:
        raise GridError("need at least 3 samples")
    dn = g.with_samples(_differentiate(g.samples, g.du, n))
    return _left_integral(dn, n - beta)


def caputo_derivative(g: GridFunction, order: FracOrder, side: Side = Side.LEFT) -> GridFunction:
    """Caputo F^alpha-derivative: the order ``n - beta`` integral of ``D**n g``."""
    if side is Side.RIGHT:
        return _mirrored(_left_caputo, g, order.beta, order.n)
    return _left_caputo(g, order.beta, order.n)
