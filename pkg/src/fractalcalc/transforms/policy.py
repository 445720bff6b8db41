"""Truncation of the half-line integrals behind the transforms."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import DomainError


@dataclass(frozen=True)
class TruncationPolicy:
    """The transforms integrate over ``[u_min, u_max]`` instead of ``(0, inf)``.

    ``u_min`` only matters for the Mellin transform, whose weight
    ``u**(sigma-1)`` is singular at 0. Tail bounds above ``tail_tol`` raise.
    """

    u_max: float = 60.0
    u_min: float = 1e-8
    tail_tol: float = 1e-6

    def __post_init__(self):
        if not 0 < self.u_min < self.u_max:
            raise DomainError("need 0 < u_min < u_max")
        if not self.tail_tol > 0:
            raise DomainError("tail_tol must be positive")
