"""Staircase coordinates: functions of ``u = S(z)`` on a uniform grid.

Every operator in the package acts on a :class:`GridFunction`. Besides the
uniform samples it may carry a short list of exact power terms
``c * (u - u0)**p`` so that weakly singular behaviour at the left end (for
example ``u**(-beta)``) is represented without sampling a singularity.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import GridError, RangeError
from .fractal_support import Staircase

__all__ = ["GridFunction", "pseudo_inverse", "to_grid", "from_grid", "grid_nodes"]


def grid_nodes(u0: float, u_end: float, n: int) -> np.ndarray:
    return np.linspace(u0, u_end, n)


@dataclass(frozen=True)
class GridFunction:
    """``g(u) = interp(samples)(u) + sum c * (u - u0)**p`` on ``u0 + j*du``.

    Exponents at or below ``-1`` are allowed (derivatives of order >= 1
    produce them) but such functions cannot be integrated; see
    :attr:`integrable`.
    """

    u0: float
    du: float
    samples: np.ndarray
    powers: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        if s.ndim != 1 or len(s) < 2:
            raise GridError("a grid function needs at least 2 samples")
        if not self.du > 0:
            raise GridError(f"grid spacing must be positive, got {self.du}")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "u0", float(self.u0))
        object.__setattr__(self, "du", float(self.du))
        powers = []
        for c, p in self.powers:
            if not (math.isfinite(c) and math.isfinite(p)):
                raise GridError(f"power term ({c}, {p}) is not finite")
            if c != 0:
                powers.append((float(c), float(p)))
        object.__setattr__(self, "powers", tuple(powers))

    @classmethod
    def from_function(cls, f, u0: float, u_end: float, n: int) -> "GridFunction":
        if n < 2:
            raise GridError("need n >= 2")
        if not u_end > u0:
            raise GridError("u_end must exceed u0")
        u = grid_nodes(u0, u_end, n)
        return cls(u0, (u_end - u0) / (n - 1), np.broadcast_to(f(u), u.shape))

    @property
    def n(self) -> int:
        return len(self.samples)

    @property
    def u_end(self) -> float:
        return self.u0 + self.du * (self.n - 1)

    @property
    def nodes(self) -> np.ndarray:
        return grid_nodes(self.u0, self.u_end, self.n)

    def power_part(self, u) -> np.ndarray:
        # 0**p is 0, 1 or inf depending on the sign of p, as wanted at u0;
        # singular terms of opposite sign give nan there
        x = np.maximum(np.asarray(u, dtype=float) - self.u0, 0.0)
        out = np.zeros_like(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            for c, p in self.powers:
                out = out + c * np.power(x, p)
        return out

    def values(self) -> np.ndarray:
        """Function values at the nodes; ``inf`` at ``u0`` for singular terms."""
        if not self.powers:
            return self.samples.copy()
        return self.samples + self.power_part(self.nodes)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        lo, hi = self.u0, self.u_end
        slack = 1e-9 * self.du
        if np.any((u < lo - slack) | (u > hi + slack)):
            raise RangeError(f"evaluation outside [{lo}, {hi}]")
        out = np.interp(u, self.nodes, self.samples)
        if self.powers:
            out = out + self.power_part(np.clip(u, lo, hi))
        return float(out) if out.ndim == 0 else out

    @property
    def is_smooth(self) -> bool:
        return not self.powers

    @property
    def integrable(self) -> bool:
        return all(p > -1 for _, p in self.powers)

    def with_samples(self, samples) -> "GridFunction":
        return replace(self, samples=np.asarray(samples, dtype=float))

    def _check_grid(self, other: "GridFunction"):
        same = (
            self.n == other.n
            and abs(self.u0 - other.u0) <= 1e-12 * max(1.0, abs(self.u0))
            and abs(self.du - other.du) <= 1e-12 * self.du
        )
        if not same:
            raise GridError("grid functions live on different grids")

    def __add__(self, other):
        if isinstance(other, GridFunction):
            self._check_grid(other)
            return GridFunction(self.u0, self.du, self.samples + other.samples, _merge(self.powers + other.powers))
        return replace(self, samples=self.samples + float(other))

    __radd__ = __add__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, k):
        if isinstance(k, GridFunction):
            raise TypeError("pointwise products of grid functions are not supported")
        k = float(k)
        return GridFunction(self.u0, self.du, k * self.samples, tuple((k * c, p) for c, p in self.powers))

    __rmul__ = __mul__

    def to_csv(self, path) -> None:
        """Write ``u,g`` rows; the node at ``u0`` is omitted if it is singular."""
        u, g = self.nodes, self.values()
        keep = np.isfinite(g)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["u", "g"])
            for a, b in zip(u[keep], g[keep]):
                w.writerow([f"{a:.17g}", f"{b:.17g}"])


def _merge(powers):
    acc: dict[float, float] = {}
    for c, p in powers:
        acc[p] = acc.get(p, 0.0) + c
    return tuple((c, p) for p, c in sorted(acc.items()) if c != 0)


def pseudo_inverse(S: Staircase, u):
    """Leftmost ``z`` with ``S(z) = u``; plateaus resolve to their left end."""
    v, b = S.values, S.breakpoints
    ua = np.asarray(u, dtype=float)
    tol = 1e-12 * max(1.0, abs(v[-1]))
    if np.any((ua < v[0] - tol) | (ua > v[-1] + tol)):
        raise RangeError(f"u outside the staircase range [{v[0]}, {v[-1]}]")
    uc = np.clip(ua, v[0], v[-1])
    i = np.searchsorted(v, uc, side="left")
    i = np.clip(i, 0, len(v) - 1)
    prev = np.maximum(i - 1, 0)
    dv = v[i] - v[prev]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(dv > 0, (uc - v[prev]) / dv, 1.0)
    z = np.where(uc >= v[i], b[i], b[prev] + t * (b[i] - b[prev]))
    return float(z) if z.ndim == 0 else z


def to_grid(f, S: Staircase, n: int) -> GridFunction:
    """Sample ``f(z)`` at the pseudo-inverse of a uniform grid on the mass range."""
    if n < 2:
        raise GridError("need n >= 2")
    u0, u1 = float(S.values[0]), float(S.values[-1])
    u = grid_nodes(u0, u1, n)
    z = pseudo_inverse(S, u)
    try:
        g = np.broadcast_to(np.asarray(f(z), dtype=float), z.shape)
    except (TypeError, ValueError):
        g = np.array([float(f(x)) for x in z])
    return GridFunction(u0, (u1 - u0) / (n - 1), g)


def from_grid(g: GridFunction, S: Staircase, z):
    """Evaluate ``g`` at ``u = S(z)``."""
    lo, hi = S.domain
    za = np.asarray(z, dtype=float)
    if np.any((za < lo) | (za > hi)):
        raise RangeError(f"z outside the staircase domain [{lo}, {hi}]")
    return g(S(za))
