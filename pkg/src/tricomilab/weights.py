"""Cone-distance weights ``((phi(t) + M)^2 - x^2)^gamma``."""

from dataclasses import dataclass
import math

import numpy as np

from .errors import ConeViolationError, InputError
from .specfun import char_radius

__all__ = ["WeightSpec", "LEAK_TOLERANCE"]

LEAK_TOLERANCE = 1e-5


@dataclass(frozen=True)
class WeightSpec:
    """Weight exponent, Lebesgue exponent and cone shift.

    Parameters
    ----------
    gamma : float
        Exponent of the cone-distance base; may be negative.
    q : float
        Lebesgue exponent, ``q > 1``.
    M : float
        Support radius of the data, ``M > 1``.
    shift : {"plus_M", "zero"}
        ``"plus_M"`` uses ``(phi(t) + M)^2 - x^2``; ``"zero"`` uses
        ``phi(t)^2 - x^2``.
    """

    gamma: float
    q: float
    M: float = 2.0
    shift: str = "plus_M"

    def __post_init__(self):
        if not self.q > 1.0:
            raise InputError(f"q must exceed 1, got {self.q}")
        if not self.M > 1.0:
            raise InputError(f"M must exceed 1, got {self.M}")
        if self.shift not in ("plus_M", "zero"):
            raise InputError(f"unknown shift {self.shift!r}")

    def base(self, t, x):
        r = self.radius(t)
        return r * r - np.asarray(x, dtype=float) ** 2

    def radius(self, t):
        return float(char_radius(t)) + (self.M if self.shift == "plus_M" else 0.0)

    def weighted(self, t, x, u, tol=LEAK_TOLERANCE, pad=None):
        """``W(t, x) * u`` with the weight taken only where its base is positive.

        Raises
        ------
        ConeViolationError
            If more than ``tol`` of the L2 mass of ``u`` lies beyond the cone
            widened by ``pad`` (default two grid cells), the same allowance
            used for the cone-leak diagnostic.
        """
        u = np.asarray(u, dtype=float)
        x = np.asarray(x, dtype=float)
        b = self.base(t, x)
        inside = b > 0
        if not np.all(inside):
            if pad is None:
                pad = 2.0 * abs(x[1] - x[0]) if x.size > 1 else 0.0
            far = np.abs(x) > self.radius(t) + pad
            total = float(np.sum(u * u))
            bad = float(np.sum(u[far] ** 2))
            if total > 0 and math.sqrt(bad / total) > tol:
                raise ConeViolationError(
                    f"weight base non-positive on the support of u at t={t:.6g} "
                    f"(relative mass {math.sqrt(bad / total):.3g})")
        out = np.zeros_like(u)
        if self.gamma == 0.0:
            out[inside] = u[inside]
        else:
            out[inside] = b[inside] ** self.gamma * u[inside]
        return out

    def density(self, t, x, u, dx, tol=LEAK_TOLERANCE):
        """``int |W u|^q dx`` at one time (trapezoid on the periodic grid)."""
        return float(np.sum(np.abs(self.weighted(t, x, u, tol=tol)) ** self.q) * dx)
