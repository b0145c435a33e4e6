"""Blowup functionals and the Riccati-type growth criterion.

``G(t) = int u dx`` satisfies ``G'' = int N(t, u) dx`` for compactly
supported solutions. ``G1(t) = int u lam(t) e^x dx`` uses the decaying
Airy-type solution ``lam`` of ``lam'' = t lam`` as a test function.
"""

from dataclasses import dataclass, field
import json
import math

import numpy as np

from .errors import InputError
from .specfun import airy_lambda_scaled, char_radius

__all__ = [
    "RiccatiWitness",
    "functional_G",
    "functional_G1",
    "lambda_duality",
    "second_derivative",
    "power_floor",
    "riccati_exponents",
    "riccati_check",
    "exponent_case",
    "test_function_bound",
]


def functional_G(state):
    """Spatial integral of ``u`` (trapezoid rule on the periodic grid)."""
    return float(np.sum(state.u) * state.grid.dx)


def _cone_weights(state, M, scaled_value):
    # lam(t) e^x on the cone, combined in the exponent to avoid overflow
    if M is None:
        M = state.M
    if M is None:
        raise InputError("support radius M is required")
    zeta = float(char_radius(state.t))
    x = state.grid.x
    inside = np.abs(x) <= M + zeta
    if scaled_value == 0.0:
        return inside, np.zeros(np.count_nonzero(inside))
    sign = math.copysign(1.0, scaled_value)
    return inside, sign * np.exp(x[inside] - zeta + math.log(abs(scaled_value)))


def functional_G1(state, M=None):
    """``int u(t, x) lam(t) e^x dx`` over the cone ``|x| <= M + phi(t)``."""
    lam_s, _ = airy_lambda_scaled(state.t)
    inside, w = _cone_weights(state, M, lam_s)
    return float(np.sum(state.u[inside] * w) * state.grid.dx)


def lambda_duality(state, M=None):
    """``H(t) = int (u_t lam - u lam') e^x dx``; constant along linear solutions."""
    lam_s, dlam_s = airy_lambda_scaled(state.t)
    inside, w = _cone_weights(state, M, lam_s)
    _, dw = _cone_weights(state, M, dlam_s)
    dx = state.grid.dx
    return float(np.sum(state.ut[inside] * w) * dx - np.sum(state.u[inside] * dw) * dx)


def second_derivative(t, y):
    """Centred second differences on a non-uniform grid (interior points)."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    h1 = t[1:-1] - t[:-2]
    h2 = t[2:] - t[1:-1]
    d2 = 2.0 * ((y[2:] - y[1:-1]) / h2 - (y[1:-1] - y[:-2]) / h1) / (h1 + h2)
    return t[1:-1], d2


def power_floor(t, y, exponent):
    """Largest ``c`` with ``y >= c * t**exponent`` on the samples."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.size == 0 or np.any(t <= 0):
        raise InputError("need positive sample times")
    return float(np.min(y / t ** exponent))


def riccati_exponents(p):
    """``(q, alpha)`` of the growth lemma: ``q = 1.5 (p-1)``, ``alpha`` by cases."""
    p = float(p)
    q = 1.5 * (p - 1.0)
    alpha = 2.0 - p / 4.0 if p < 4.0 else 1.0
    return q, alpha


def exponent_case(p):
    """Return ``(alpha, predicted_blowup)``; blowup is predicted for ``p < 5``."""
    if not p > 1:
        raise InputError("p must exceed 1")
    _, alpha = riccati_exponents(p)
    return alpha, bool(p < 5.0)


def _lemma_condition(p, q, alpha):
    # strict: equality only at p = 5, which is left unclassified as blowup
    return bool(p > 1.0 and alpha >= 1.0 and (p - 1.0) * alpha > q - 2.0 + 1e-12)


@dataclass
class RiccatiWitness:
    """Best constants of the two lemma inequalities on a sampled window.

    ``C0 = min G / (R + t)^alpha`` and ``C1 = min G'' (R + t)^q / G^p``;
    both positive means the data witness the lemma's hypotheses.
    """

    p: float
    q_exponent: float
    alpha: float
    C0: float
    C1: float
    lemma_satisfied: bool
    window: tuple
    samples: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        q, a = riccati_exponents(self.p)
        if abs(self.q_exponent - q) > 1e-12 or abs(self.alpha - a) > 1e-12:
            raise ValueError("exponents inconsistent with p")

    @property
    def hypotheses_witnessed(self):
        return bool(self.C0 > 0 and self.C1 > 0)

    def as_dict(self):
        return {
            "p": float(self.p),
            "q": float(self.q_exponent),
            "alpha": float(self.alpha),
            "C0": float(self.C0),
            "C1": float(self.C1),
            "lemma_satisfied": bool(self.lemma_satisfied),
            "window": [float(v) for v in self.window],
        }

    def to_json(self, path=None, provenance=None):
        doc = self.as_dict()
        if provenance:
            doc["provenance"] = provenance
        text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def riccati_check(traj, p, R=None, t_window=None):
    """Fit the constants of the growth lemma to a trajectory.

    Parameters
    ----------
    traj : TrajectoryRecord
        Needs ``t`` and ``mean`` (= G) columns; ``G''`` is taken by centred
        differences at the recording rate.
    p : float
    R : float, optional
        Shift in ``(R + t)``; defaults to the support radius ``traj.M``.
    t_window : (float, float), optional
        Restrict the samples used; defaults to the whole record.

    Returns
    -------
    RiccatiWitness
    """
    R = traj.M if R is None else R
    if R is None:
        raise InputError("R is required when the record carries no support radius")
    t_mid, g2 = second_derivative(traj.t, traj.mean)
    g_mid = np.asarray(traj.mean, dtype=float)[1:-1]
    lo, hi = (-np.inf, np.inf) if t_window is None else t_window
    sel = (t_mid >= lo) & (t_mid <= hi) & np.isfinite(g2) & np.isfinite(g_mid)
    if np.count_nonzero(sel) < 10:
        raise InputError("window holds fewer than 10 samples")
    ts, gs, g2s = t_mid[sel], g_mid[sel], g2[sel]
    q, alpha = riccati_exponents(p)
    c0 = float(np.min(gs / (R + ts) ** alpha))
    if np.all(gs > 0):
        c1 = float(np.min(g2s * (R + ts) ** q / gs ** p))
    else:
        c1 = -np.inf
    return RiccatiWitness(
        p=float(p), q_exponent=q, alpha=alpha, C0=c0, C1=c1,
        lemma_satisfied=_lemma_condition(float(p), q, alpha),
        window=(float(ts[0]), float(ts[-1])),
        samples={"t": ts, "G": gs, "G2": g2s})


def test_function_bound(t, p, M):
    """``(int_{|x| <= M + phi(t)} psi^(p/(p-1)) dx)^(p-1)`` for ``psi = lam(t) e^x``.

    Expected to behave like ``t^(-p/4)``. Evaluated in logarithms.
    """
    t = float(t)
    k = p / (p - 1.0)
    zeta = float(char_radius(t))
    r = M + zeta
    lam_s, _ = airy_lambda_scaled(t)
    # int_{-r}^{r} e^{k x} dx = e^{k r} (1 - e^{-2 k r}) / k
    log_int = k * r + math.log1p(-math.exp(-2.0 * k * r)) - math.log(k)
    log_val = p * (math.log(lam_s) - zeta) + (p - 1.0) * log_int
    return math.exp(log_val)
