"""Error metrics, check records and CSV writers shared by the verifiers."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

__all__ = ["rel_err", "CheckResult", "write_rows", "TABLE1_HEADER", "TRANSFORM_HEADER"]

TABLE1_HEADER = ("row", "column", "beta", "m", "max_rel_err", "status")
TRANSFORM_HEADER = (
    "identity",
    "param_json",
    "sigma_or_us",
    "lhs",
    "rhs",
    "rel_err",
    "status",
    "erratum_variant_err",
)


def rel_err(numeric, exact, skip_first: bool = False) -> float:
    """Sup-norm error relative to the sup norm of ``exact``.

    Falls back to the absolute error when ``exact`` vanishes identically.
    ``skip_first`` drops the left-end node, where closed forms such as
    ``u**(-beta)`` are singular.
    """
    num = np.atleast_1d(np.asarray(numeric, dtype=float))
    ex = np.atleast_1d(np.asarray(exact, dtype=float))
    if skip_first:
        num, ex = num[1:], ex[1:]
    scale = float(np.max(np.abs(ex))) if ex.size else 0.0
    err = float(np.max(np.abs(num - ex))) if ex.size else 0.0
    if not np.isfinite(err):
        return float("inf")
    return err / scale if scale > 0 else err


@dataclass(frozen=True)
class CheckResult:
    """One verified identity.

    ``erratum`` marks a check that reproduces a printed formula believed to
    be wrong; such checks are reported but never decide the exit status.
    ``skipped`` marks a sample dropped at a gamma pole; it is reported and
    counts as passed.
    """

    name: str
    error: float
    tol: float
    params: dict = field(default_factory=dict)
    erratum: bool = False
    note: str = ""
    point: float = float("nan")
    lhs: float = float("nan")
    rhs: float = float("nan")
    variant_error: float | None = None
    skipped: bool = False

    @property
    def passed(self) -> bool:
        if self.skipped:
            return True
        return bool(np.isfinite(self.error) and self.error <= self.tol)

    @property
    def status(self) -> str:
        if self.skipped:
            return "skipped"
        if self.erratum:
            return "erratum-confirmed" if not self.passed else "erratum-not-reproduced"
        return "pass" if self.passed else "fail"

    def params_json(self) -> str:
        return json.dumps(self.params, sort_keys=True)

    def as_transform_row(self) -> tuple:
        variant = "" if self.variant_error is None else self.variant_error
        return (self.name, self.params_json(), self.point, self.lhs, self.rhs, self.error, self.status, variant)


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_rows(path, header, rows) -> None:
    """Write ``rows`` (sequences) under ``header`` with 17 significant digits."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])
