"""Pre-fractal approximations of fractal sets and curves and their staircases.

Sets are attractors of affine IFS on ``[0, 1]``; curves are generated by
recursive substitution of a polyline generator into the unit segment. The
infimum over subdivisions in the mass functions is replaced by the natural
subdivision of the depth-``n`` approximation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import DomainError, NoConvergence, SpecError
from .special_functions import gamma

__all__ = [
    "IfsSetSpec",
    "FractalSetApprox",
    "CurveGeneratorSpec",
    "FractalCurveApprox",
    "Staircase",
    "DimensionEstimate",
    "CANTOR",
    "VON_KOCH",
    "build_set",
    "coarse_mass",
    "staircase_of_set",
    "build_curve",
    "rise_function",
    "euclidean_reach",
    "estimate_dimension",
    "similarity_dimension",
    "on_support",
    "parse_spec_text",
    "load_spec",
    "write_staircase_csv",
]


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class IfsSetSpec:
    """Affine contractions ``z -> r*z + t`` of ``[0, 1]``, ordered by offset."""

    maps: tuple[tuple[float, float], ...]
    name: str = "ifs"

    def __post_init__(self):
        maps = tuple((float(r), float(t)) for r, t in self.maps)
        if len(maps) < 2:
            raise SpecError("an IFS needs at least 2 maps")
        for r, t in maps:
            if not 0 < r < 1:
                raise SpecError(f"contraction ratio {r} not in (0, 1)")
            if t < -1e-15 or t + r > 1 + 1e-15:
                raise SpecError(f"image [{t}, {t + r}] leaves [0, 1]")
        maps = tuple(sorted(maps, key=lambda m: m[1]))
        # open-set condition: images of [0, 1] may only touch at endpoints
        for (r0, t0), (_, t1) in zip(maps, maps[1:]):
            if t0 + r0 > t1 + 1e-15:
                raise SpecError("IFS images overlap (open-set condition fails)")
        object.__setattr__(self, "maps", maps)

    @property
    def ratios(self) -> np.ndarray:
        return np.array([r for r, _ in self.maps])


@dataclass(frozen=True)
class FractalSetApprox:
    """Depth-``n`` pre-fractal: sorted closed intervals with exact lengths."""

    intervals: np.ndarray
    lengths: np.ndarray
    depth: int
    spec: IfsSetSpec

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.intervals[0, 0]), float(self.intervals[-1, 1])


@dataclass(frozen=True)
class CurveGeneratorSpec:
    """Polyline from the origin to ``(1, 0, ...)`` that replaces every segment."""

    generator: np.ndarray
    name: str = "curve"

    def __post_init__(self):
        g = np.array(self.generator, dtype=float)
        if g.ndim != 2 or g.shape[1] < 2:
            raise SpecError("generator must be a list of points with dimension >= 2")
        if len(g) < 3:
            raise SpecError("generator needs at least 2 segments")
        target = np.zeros(g.shape[1])
        target[0] = 1.0
        if not (np.allclose(g[0], 0.0, atol=1e-12) and np.allclose(g[-1], target, atol=1e-12)):
            raise SpecError("generator must run from the origin to (1, 0, ...)")
        seg = np.linalg.norm(np.diff(g, axis=0), axis=1)
        if np.any(seg <= 0) or np.any(seg >= 1):
            raise SpecError("every generator segment must be non-degenerate and shorter than 1")
        g[0] = 0.0
        g[-1] = target
        object.__setattr__(self, "generator", _frozen(g))

    @property
    def ratios(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.generator, axis=0), axis=1)


@dataclass(frozen=True)
class FractalCurveApprox:
    """Generation-``n`` polyline with vertex-index parametrization on ``[0, 1]``."""

    vertices: np.ndarray
    params: np.ndarray
    segments: np.ndarray
    generation: int
    spec: CurveGeneratorSpec

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.params[0]), float(self.params[-1])


@dataclass(frozen=True)
class Staircase:
    """Monotone piecewise-linear map; constant outside its breakpoints.

    Holds both the integral staircase of a set and the rise function of a curve.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    label: str = "S"
    gaps: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        b = _frozen(self.breakpoints)
        v = _frozen(self.values)
        if b.shape != v.shape or b.ndim != 1 or len(b) < 2:
            raise DomainError("breakpoints and values must be matching 1-d arrays")
        if np.any(np.diff(b) <= 0):
            raise DomainError("breakpoints must be strictly increasing")
        if np.any(np.diff(v) < 0):
            raise DomainError("staircase values must be non-decreasing")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)
        if self.gaps is not None:
            object.__setattr__(self, "gaps", _frozen(self.gaps).reshape(-1, 2))

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    @property
    def total(self) -> float:
        return float(self.values[-1] - self.values[0])

    def __call__(self, z):
        out = np.interp(z, self.breakpoints, self.values)
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class DimensionEstimate:
    estimate: float
    similarity: float | None


CANTOR = IfsSetSpec(((1 / 3, 0.0), (1 / 3, 2 / 3)), name="triadic-cantor")
VON_KOCH = CurveGeneratorSpec(
    [[0.0, 0.0], [1 / 3, 0.0], [0.5, math.sqrt(3) / 6], [2 / 3, 0.0], [1.0, 0.0]],
    name="von-koch",
)


def build_set(spec: IfsSetSpec, depth: int) -> FractalSetApprox:
    """Apply the IFS ``depth`` times to ``[0, 1]``."""
    if depth < 0:
        raise DomainError("depth must be non-negative")
    left, right = np.array([0.0]), np.array([1.0])
    length = np.array([1.0])
    for _ in range(depth):
        left = np.concatenate([r * left + t for r, t in spec.maps])
        right = np.concatenate([r * right + t for r, t in spec.maps])
        # lengths are tracked separately so masses avoid endpoint round-off
        length = np.concatenate([r * length for r, _ in spec.maps])
    order = np.argsort(left, kind="stable")
    intervals = np.column_stack([left[order], right[order]])
    length = length[order]
    return FractalSetApprox(_frozen(intervals), _frozen(length), depth, spec)


def _clipped_lengths(approx: FractalSetApprox, c1: float, c2: float) -> np.ndarray:
    a = approx.intervals[:, 0]
    b = approx.intervals[:, 1]
    inside = (a >= c1) & (b <= c2)
    clipped = np.clip(np.minimum(b, c2) - np.maximum(a, c1), 0.0, None)
    return np.where(inside, approx.lengths, clipped)


def coarse_mass(approx: FractalSetApprox, alpha: float, c1: float, c2: float) -> float:
    """Coarse-grained mass of ``F ∩ [c1, c2]`` on the natural subdivision.

    Gap cells carry flag 0, so only the (clipped) intervals contribute
    ``Gamma(alpha + 1) * length**alpha``.
    """
    lo, hi = approx.domain
    if c1 < lo - 1e-15 or c2 > hi + 1e-15 or c1 > c2:
        raise DomainError(f"[{c1}, {c2}] is not inside the domain [{lo}, {hi}]")
    if not 0 < alpha <= 1:
        raise DomainError("set mass requires 0 < alpha <= 1")
    ell = _clipped_lengths(approx, c1, c2)
    ell = ell[ell > 0]
    return gamma(alpha + 1.0) * math.fsum(ell**alpha)


def staircase_of_set(approx: FractalSetApprox, alpha: float) -> Staircase:
    """Integral staircase ``S(z) = mass(F ∩ [c0, z])`` with ``c0`` the left end."""
    if not 0 < alpha <= 1:
        raise DomainError("set staircase requires 0 < alpha <= 1")
    pieces = gamma(alpha + 1.0) * approx.lengths**alpha
    cum = np.concatenate([[0.0], np.cumsum(pieces)])
    left = approx.intervals[:, 0]
    right = approx.intervals[:, 1]
    z = np.empty(2 * len(left))
    s = np.empty_like(z)
    z[0::2], z[1::2] = left, right
    s[0::2], s[1::2] = cum[:-1], cum[1:]
    # touching intervals share an endpoint
    keep = np.concatenate([[True], np.diff(z) > 0])
    gaps = np.column_stack([right[:-1], left[1:]])
    gaps = gaps[gaps[:, 1] > gaps[:, 0]]
    return Staircase(z[keep], s[keep], label="S", gaps=gaps)


def _rotations_from_e1(w: np.ndarray) -> np.ndarray:
    """Similarity matrices mapping ``e1`` onto each row of ``w``.

    The rotation acts in the plane spanned by ``e1`` and ``w``; in two
    dimensions this is the ordinary rotation by the angle of ``w``.
    """
    k, d = w.shape
    length = np.linalg.norm(w, axis=1)
    what = w / length[:, None]
    c = what[:, 0]
    perp = what.copy()
    perp[:, 0] = 0.0
    s = np.linalg.norm(perp, axis=1)
    u = np.zeros_like(w)
    flat = s < 1e-15
    u[~flat] = perp[~flat] / s[~flat, None]
    # (anti)parallel to e1: any plane works, pick e1-e2 (c = -1 gives a half turn)
    u[flat, 1] = 1.0
    e1 = np.zeros(d)
    e1[0] = 1.0
    eye = np.eye(d)
    e1e1 = np.outer(e1, e1)
    R = (
        eye[None]
        + (c - 1.0)[:, None, None] * (e1e1[None] + np.einsum("ki,kj->kij", u, u))
        + s[:, None, None] * (np.einsum("ki,j->kij", u, e1) - np.einsum("i,kj->kij", e1, u))
    )
    return R * length[:, None, None]


def build_curve(spec: CurveGeneratorSpec, generation: int) -> FractalCurveApprox:
    """Substitute the generator into every segment ``generation`` times."""
    if generation < 0:
        raise DomainError("generation must be non-negative")
    d = spec.generator.shape[1]
    gen_steps = np.diff(spec.generator, axis=0)
    seg = np.zeros((1, d))
    seg[0, 0] = 1.0
    for _ in range(generation):
        R = _rotations_from_e1(seg)
        seg = np.einsum("kij,gj->kgi", R, gen_steps).reshape(-1, d)
    vertices = np.vstack([np.zeros((1, d)), np.cumsum(seg, axis=0)])
    params = np.linspace(0.0, 1.0, len(vertices))
    return FractalCurveApprox(_frozen(vertices), _frozen(params), _frozen(seg), generation, spec)


def rise_function(curve: FractalCurveApprox, alpha: float) -> Staircase:
    """Rise function ``J`` from the polyline's own vertices as the subdivision."""
    d = curve.vertices.shape[1]
    if not 1 <= alpha <= d:
        raise DomainError(f"curve mass requires 1 <= alpha <= {d}")
    pieces = np.linalg.norm(curve.segments, axis=1) ** alpha / gamma(alpha + 1.0)
    values = np.concatenate([[0.0], np.cumsum(pieces)])
    return Staircase(curve.params, values, label="J")


def euclidean_reach(curve: FractalCurveApprox, z: float) -> float:
    """Distance ``|v(z)|`` of the interpolated curve point from the origin."""
    lo, hi = curve.domain
    if not lo <= z <= hi:
        raise DomainError(f"parameter {z} outside [{lo}, {hi}]")
    point = [np.interp(z, curve.params, curve.vertices[:, i]) for i in range(curve.vertices.shape[1])]
    return float(np.linalg.norm(point))


def similarity_dimension(ratios) -> float:
    """Root of the Moran equation ``sum r_i**s = 1``."""
    r = np.asarray(ratios, dtype=float)
    if np.allclose(r, r[0]):
        return math.log(len(r)) / math.log(1.0 / r[0])
    lo, hi = 0.0, 64.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.sum(r**mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _level_pieces(approx, level: int) -> np.ndarray:
    if isinstance(approx, FractalSetApprox):
        return build_set(approx.spec, level).lengths
    return np.linalg.norm(build_curve(approx.spec, level).segments, axis=1)


def estimate_dimension(approx, tol: float = 1e-6, max_iter: int = 200) -> DimensionEstimate:
    """Bisection for the exponent at which the mass is depth-invariant.

    Compares the natural-subdivision mass of the approximation with the mass
    one level coarser; the log-ratio decreases in ``alpha`` and vanishes at the
    dimension. The similarity dimension of the generating spec is returned
    alongside for cross-checking.
    """
    if isinstance(approx, FractalSetApprox):
        level, lo, hi = approx.depth, 1e-9, 1.0
        ratios = approx.spec.ratios
    elif isinstance(approx, FractalCurveApprox):
        level, lo, hi = approx.generation, 1.0, float(approx.vertices.shape[1])
        ratios = approx.spec.ratios
    else:
        raise TypeError(f"cannot estimate the dimension of {type(approx).__name__}")
    if level == 0:
        # a single interval or segment
        return DimensionEstimate(1.0, None)

    fine = _level_pieces(approx, level)
    coarse = _level_pieces(approx, level - 1)

    def log_ratio(a):
        return math.log(math.fsum(fine**a)) - math.log(math.fsum(coarse**a))

    f_lo, f_hi = log_ratio(lo), log_ratio(hi)
    sim = similarity_dimension(ratios)
    if abs(f_hi) <= tol:
        return DimensionEstimate(hi, sim)
    if abs(f_lo) <= tol:
        return DimensionEstimate(lo, sim)
    if f_lo < 0 or f_hi > 0:
        raise NoConvergence("mass ratio does not change sign on the admissible range")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = log_ratio(mid)
        if abs(f_mid) <= tol * 1e-6 or hi - lo < 1e-14:
            return DimensionEstimate(mid, sim)
        if f_mid > 0:
            lo = mid
        else:
            hi = mid
    raise NoConvergence(f"bisection did not converge in {max_iter} iterations")


def on_support(approx: FractalSetApprox, z) -> np.ndarray:
    """Characteristic function of the approximation's intervals."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    i = np.searchsorted(approx.intervals[:, 0], z, side="right") - 1
    ok = i >= 0
    i = np.clip(i, 0, None)
    return ok & (z <= approx.intervals[i, 1])


# --- spec files -----------------------------------------------------------

def _number(text: str) -> float:
    text = text.strip()
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        pass
    for op in "*/":
        if op in text:
            a, b = text.rsplit(op, 1)
            x, y = _number(a), _number(b)
            if op == "*":
                return x * y
            if y == 0:
                raise SpecError(f"division by zero in {text!r}")
            return x / y
    if text.lower().startswith("sqrt(") and text.endswith(")"):
        return math.sqrt(_number(text[5:-1]))
    raise SpecError(f"cannot parse number {text!r}")


@dataclass(frozen=True)
class SupportSpec:
    """Parsed ``key=value`` support description."""

    kind: str
    spec: IfsSetSpec | CurveGeneratorSpec
    depth: int | None = None
    alpha: float | None = None  # None means "auto"


def parse_spec_text(text: str) -> SupportSpec:
    """Parse ``kind=set|curve``, ``maps=`` / ``generator=``, ``depth=``, ``alpha=``.

    ``maps`` is a ``;``-separated list of ``ratio:offset`` pairs and
    ``generator`` a ``;``-separated list of comma-separated points. Numbers
    may be decimals, fractions such as ``2/3`` or ``sqrt(3)/6``-style products.
    """
    items = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"expected key=value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        items[key.lower()] = value
    kind = items.get("kind")
    name = items.get("name", kind or "support")
    if kind == "set":
        if "maps" not in items:
            raise SpecError("a set spec needs maps=")
        maps = []
        for pair in items["maps"].split(";"):
            if ":" not in pair:
                raise SpecError(f"map {pair!r} is not ratio:offset")
            r, t = pair.split(":", 1)
            maps.append((_number(r), _number(t)))
        spec = IfsSetSpec(tuple(maps), name=name)
    elif kind == "curve":
        if "generator" not in items:
            raise SpecError("a curve spec needs generator=")
        pts = [[_number(c) for c in p.split(",")] for p in items["generator"].split(";")]
        spec = CurveGeneratorSpec(pts, name=name)
    else:
        raise SpecError(f"kind must be 'set' or 'curve', got {kind!r}")
    depth = int(items["depth"]) if "depth" in items else None
    alpha_text = items.get("alpha", "auto")
    alpha = None if alpha_text == "auto" else _number(alpha_text)
    return SupportSpec(kind, spec, depth, alpha)


BUILTIN_SPECS = {
    "cantor": "kind=set\nname=triadic-cantor\nmaps=1/3:0; 1/3:2/3\ndepth=10\nalpha=auto\n",
    "koch": (
        "kind=curve\nname=von-koch\n"
        "generator=0,0; 1/3,0; 1/2,sqrt(3)/6; 2/3,0; 1,0\ndepth=6\nalpha=auto\n"
    ),
}


def load_spec(path_or_name: str) -> SupportSpec:
    """Load a spec file, or one of the built-in names ``cantor`` / ``koch``."""
    p = Path(path_or_name)
    if p.exists():
        return parse_spec_text(p.read_text())
    if path_or_name in BUILTIN_SPECS:
        return parse_spec_text(BUILTIN_SPECS[path_or_name])
    raise SpecError(f"no spec file or built-in spec named {path_or_name!r}")


def write_staircase_csv(stair: Staircase, path, label: str | None = None) -> None:
    """Write one ``z,<label>`` row per breakpoint with 17 significant digits."""
    label = label or stair.label
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["z", label])
        for z, s in zip(stair.breakpoints, stair.values):
            w.writerow([f"{z:.17g}", f"{s:.17g}"])
