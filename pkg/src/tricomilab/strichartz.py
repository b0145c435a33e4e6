"""Exponent calculators, weighted space-time norms and inequality samplers.

Exponent identities are evaluated in exact rational arithmetic whenever the
inputs are ``int`` or :class:`fractions.Fraction`; floats fall back to
floating point with a ``1e-12`` boundary tolerance.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
import csv
import io
import json
import math
from typing import NamedTuple

import numpy as np
from scipy.special import roots_jacobi

from .errors import ConeOverflowError, DomainError, InputError, NoAdmissiblePairError
from .specfun import char_radius
from .weights import LEAK_TOLERANCE, WeightSpec

__all__ = [
    "GammaInterval",
    "AlphaBeta",
    "ExponentReport",
    "GlasseyConditions",
    "GlasseyScan",
    "InequalityScan",
    "P_CRIT",
    "P0",
    "P1",
    "gamma_admissible",
    "above_critical",
    "picard_gamma_window",
    "alphabeta_solve",
    "w1_coefficients",
    "critical_exponents",
    "glassey_exponents",
    "glassey_conditions",
    "glassey_apply",
    "lq_norm_halfline",
    "glassey_ratio",
    "glassey_ratio_scan",
    "weighted_norm",
    "source_weighted_norm",
    "inhomogeneous_inequality_sample",
]

P_CRIT = 5
P0 = 9
P1 = (3.0 + math.sqrt(33.0)) / 2.0

_TOL = 1e-12


def _exact(v):
    """Keep ints and Fractions exact; everything else becomes float."""
    if isinstance(v, bool):
        raise InputError("boolean is not an exponent")
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    return float(v)


def _is_exact(*vals):
    return all(isinstance(v, Fraction) for v in vals)


def _positive(x):
    # strict positivity with a float guard band
    return x > 0 if isinstance(x, Fraction) else x > _TOL


class GammaInterval(NamedTuple):
    """Open interval ``(lower, upper)`` of weight exponents."""

    lower: object
    upper: object

    @property
    def empty(self):
        return not self.upper > self.lower

    @property
    def midpoint(self):
        return (self.lower + self.upper) / 2


def gamma_admissible(p):
    """Weight exponents for the global existence statement.

    Returns ``(0, 1/6 - 5/(6(p+1)))``, or an empty interval ``(0, 0)`` when
    the upper end is not positive (``p <= 4``). The separate gate ``p > 5``
    is reported by :func:`above_critical`.
    """
    p = _exact(p)
    if not p > 1:
        raise InputError(f"p must exceed 1, got {p}")
    upper = Fraction(1, 6) - Fraction(5, 6) / (p + 1) if _is_exact(p) else 1 / 6 - 5 / (6 * (p + 1))
    zero = Fraction(0) if _is_exact(p) else 0.0
    if not upper > 0:
        return GammaInterval(zero, zero)
    return GammaInterval(zero, upper)


def above_critical(p):
    """Strict gate ``p > 5`` for small-data global existence."""
    return bool(_exact(p) > P_CRIT)


def picard_gamma_window(p):
    """Weight exponents usable in the contraction argument.

    Intersection of ``gamma < 1/(p(p+1))``, ``gamma < 1/6 - 5/(6(p+1))`` and
    ``(p-1) gamma + 1/6 > 5/(3(p+1))``; for ``p = 7`` this is ``(1/144, 1/56)``.
    """
    p = _exact(p)
    if not p > 1:
        raise InputError(f"p must exceed 1, got {p}")
    one = Fraction(1) if _is_exact(p) else 1.0
    q = p + 1
    upper = min(one / (p * q), one / 6 - 5 * one / (6 * q))
    lower = max(0 * one, (5 * one / (3 * q) - one / 6) / (p - 1))
    if not upper > lower:
        return GammaInterval(lower, lower)
    return GammaInterval(lower, upper)


@dataclass(frozen=True)
class AlphaBeta:
    """Exponent pair with ``alpha + 1/6 + beta = 5/(3q)`` and ``beta = -p alpha``."""

    alpha: object
    beta: object
    q: object
    boundary: bool = False

    def __post_init__(self):
        lhs = self.alpha + Fraction(1, 6) + self.beta if _is_exact(self.alpha, self.beta, self.q) \
            else float(self.alpha) + 1 / 6 + float(self.beta)
        rhs = Fraction(5, 3) / self.q if _is_exact(self.q) else 5 / (3 * float(self.q))
        if abs(float(lhs - rhs)) > _TOL:
            raise InputError("alpha + 1/6 + beta must equal 5/(3q)")

    @property
    def p(self):
        return self.q - 1

    def as_dict(self):
        return {"alpha": float(self.alpha), "beta": float(self.beta), "q": float(self.q),
                "boundary": bool(self.boundary)}


def alphabeta_solve(q):
    """Solve for the inhomogeneous-estimate exponents at ``q = p + 1``.

    With ``s = 2/q - 1/(3q) - 1/6`` one needs ``alpha + beta = s >= 0`` and
    ``beta < 1/q``; choosing ``beta = -p alpha`` gives ``alpha = -s/(p-1)``.

    Raises
    ------
    NoAdmissiblePairError
        If ``p`` lies outside ``(p1, 9]``; at ``p = p1`` the strict
        condition ``beta < 1/q`` degenerates to equality.
    """
    q = _exact(q)
    p = q - 1
    if not p > 1:
        raise NoAdmissiblePairError(f"q = {q} gives p <= 1")
    if _is_exact(q):
        s = 2 / q - Fraction(1, 3) / q - Fraction(1, 6)
    else:
        s = 2 / q - 1 / (3 * q) - 1 / 6
    if s < 0 and not (not _is_exact(q) and s > -_TOL):
        raise NoAdmissiblePairError(f"p = {p} exceeds 9: alpha + beta = {float(s):.6g} < 0")
    boundary = s == 0 or (not _is_exact(q) and abs(s) <= _TOL)
    if boundary:
        s = 0 * s
    alpha = -s / (p - 1)
    beta = -p * alpha
    if not _positive(1 / q - beta):
        raise NoAdmissiblePairError(
            f"p = {float(p):.12g} is not above (3+sqrt(33))/2: beta = {float(beta):.6g} >= 1/q")
    if boundary:
        alpha = beta = Fraction(0) if _is_exact(q) else 0.0
    return AlphaBeta(alpha, beta, q, boundary)


def w1_coefficients(m, n):
    """Coefficients ``(A, B, C)`` of ``A p^2 + B p + C = 0`` (integers)."""
    m, n = Fraction(m), Fraction(n)
    a = (m + 2) * n / 2 - 1
    b = (m + 2) * (1 - n / 2) - 3
    c = -(m + 2)
    return a, b, c


@dataclass
class ExponentReport:
    """All critical exponents at ``(m, n)`` plus derived admissible sets at ``p_eval``."""

    m: int
    n: int
    p_crit: float
    p_conf: float
    p0: float
    p1: float
    w1_root: float
    w1_residual: float
    p_eval: float
    gamma_interval: tuple
    above_critical: bool
    alpha_beta: dict = field(default_factory=dict)
    degenerate: str = ""

    def as_dict(self):
        return {
            "m": int(self.m),
            "n": int(self.n),
            "p_crit": float(self.p_crit),
            "p_conf": float(self.p_conf),
            "p0": float(self.p0),
            "p1": float(self.p1),
            "w1_root": float(self.w1_root),
            "w1_residual": float(self.w1_residual),
            "p_eval": float(self.p_eval),
            "gamma_interval": [float(v) for v in self.gamma_interval],
            "above_critical": bool(self.above_critical),
            "alpha_beta": self.alpha_beta,
            "degenerate": self.degenerate,
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


def critical_exponents(m=1, n=1, p_eval=9):
    """Critical powers of the generalized problem.

    Parameters
    ----------
    m : int
        Power of ``t`` in the operator ``d_t^2 - t^m d_x^2``.
    n : int
        Space dimension.
    p_eval : real
        Power at which the admissible ``gamma`` interval and ``(alpha, beta)``
        are reported.
    """
    if int(m) != m or int(n) != n or m < 1 or n < 1:
        raise InputError("m and n must be positive integers")
    m, n = int(m), int(n)
    a, b, c = w1_coefficients(m, n)
    degenerate = ""
    if a <= 0:
        root = float("nan")
        residual = float("nan")
        degenerate = f"leading coefficient {a} is not positive"
    else:
        af, bf, cf = float(a), float(b), float(c)
        disc = bf * bf - 4.0 * af * cf
        # c < 0 < a: disc > b^2, one positive root; cancellation-free form
        sq = math.sqrt(disc)
        root = (-bf + sq) / (2.0 * af) if bf <= 0 else (2.0 * -cf) / (bf + sq)
        residual = abs((af * root + bf) * root + cf)
    p_crit = 1 + Fraction(4, m)
    p_conf = Fraction(3 * n + 6, 3 * n - 2) if 3 * n - 2 > 0 else float("inf")
    gi = gamma_admissible(p_eval)
    try:
        ab = alphabeta_solve(_exact(p_eval) + 1).as_dict()
    except NoAdmissiblePairError as exc:
        ab = {"error": str(exc)}
    return ExponentReport(
        m=m, n=n, p_crit=float(p_crit), p_conf=float(p_conf), p0=float(P0), p1=P1,
        w1_root=root, w1_residual=residual, p_eval=float(p_eval),
        gamma_interval=(float(gi.lower), float(gi.upper)),
        above_critical=above_critical(p_eval), alpha_beta=ab, degenerate=degenerate)


# ---------------------------------------------------------------- Glassey --

@dataclass(frozen=True)
class GlasseyConditions:
    """Hypotheses of the one-dimensional fractional-integral bound."""

    alpha: object
    beta: object
    delta: object
    q: object
    r: object
    checks: dict

    @property
    def ok(self):
        return all(self.checks.values())

    @property
    def failed(self):
        return [k for k, v in self.checks.items() if not v]


def glassey_exponents(p):
    """``(alpha, beta, delta, q, r)`` used by the inhomogeneous estimate at power ``p``.

    ``delta = 1/(3q) + 1/6`` and ``r = q/(q-1)``; ``(alpha, beta)`` from
    :func:`alphabeta_solve` without its admissibility test, so the
    conditions can be evaluated (and fail) outside ``(p1, 9]``.
    """
    p = _exact(p)
    q = p + 1
    if _is_exact(q):
        s = 2 / q - Fraction(1, 3) / q - Fraction(1, 6)
        delta = Fraction(1, 3) / q + Fraction(1, 6)
    else:
        s = 2 / q - 1 / (3 * q) - 1 / 6
        delta = 1 / (3 * q) + 1 / 6
    alpha = -s / (p - 1)
    beta = -p * alpha
    r = q / (q - 1)
    return alpha, beta, delta, q, r


def glassey_conditions(alpha, beta, delta, q, r):
    """Evaluate each hypothesis; exact for rational inputs."""
    alpha, beta, delta, q, r = (_exact(v) for v in (alpha, beta, delta, q, r))
    exact = _is_exact(alpha, beta, delta, q, r)
    one = Fraction(1) if exact else 1.0
    gap = alpha + beta + delta - (one - (one / r - one / q))
    checks = {
        "1<r<q<inf": bool(1 < r < q),
        "balance": bool(gap == 0) if exact else bool(abs(gap) <= _TOL),
        "alpha+beta>=0": bool(alpha + beta >= 0) if exact else bool(alpha + beta >= -_TOL),
        "alpha+delta>1/q": bool(_positive(alpha + delta - one / q)),
    }
    return GlasseyConditions(alpha, beta, delta, q, r, checks)


@lru_cache(maxsize=256)
def _jacobi(n, a, b):
    x, w = roots_jacobi(n, a, b)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _graded_edges(lo, hi, near_lo, near_hi, ratio=0.2, depth=12, uniform=4):
    """Panel edges on ``[lo, hi]``, refined geometrically toward flagged ends."""
    pts = set(np.linspace(lo, hi, uniform + 1)[1:-1].tolist()) | {lo, hi}
    length = hi - lo
    for k in range(1, depth + 1):
        h = length * ratio ** k
        if near_lo:
            pts.add(lo + h)
        if near_hi:
            pts.add(hi - h)
    if near_lo or near_hi:
        pts.add(0.5 * (lo + hi))
    return sorted(pts)


def _piece_integral(g, u, lo, hi, beta, delta, nodes):
    """``int_lo^hi g(xi) (u - xi)^-delta xi^-beta dxi`` with ``0 <= lo < hi <= u``."""
    sing_hi = hi >= u and delta != 0
    sing_lo = lo == 0.0 and beta != 0
    # nearly singular ends get geometric grading; exact ends go to Jacobi weights
    dist_hi = u - hi
    dist_lo = lo
    near_hi = (not sing_hi) and delta != 0 and dist_hi < (hi - lo)
    near_lo = (not sing_lo) and beta != 0 and dist_lo < (hi - lo)
    edges = _graded_edges(lo, hi, near_lo, near_hi)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        wa = -float(delta) if (sing_hi and b == hi) else 0.0
        wb = -float(beta) if (sing_lo and a == lo) else 0.0
        x, w = _jacobi(nodes, wa, wb)
        half = 0.5 * (b - a)
        xi = a + half * (1.0 + x)
        f = np.asarray(g(xi), dtype=float)
        if wa != 0.0:
            # (u - xi) = half (1 - x) exactly at the singular end
            f = f * half ** wa
        else:
            f = f * (u - xi) ** (-float(delta))
        if wb != 0.0:
            f = f * half ** wb
        else:
            f = f * xi ** (-float(beta))
        total += half * float(np.dot(w, f))
    return total


def glassey_apply(g, alpha, beta, delta, u_grid, *, support=None, breaks=(), nodes=24):
    """Sample ``f(u) = u^-alpha int_0^u g(xi) |u - xi|^-delta xi^-beta dxi``.

    Parameters
    ----------
    g : callable or Profile
        Vectorised function on ``(0, inf)``.
    alpha, beta, delta : float
    u_grid : array_like
        Positive abscissae.
    support : (a, b), optional
        Interval outside which ``g`` vanishes; taken from a ``Profile``.
    breaks : sequence of float
        Points where ``g`` is not smooth.
    nodes : int
        Gauss-Jacobi nodes per panel.

    Raises
    ------
    DomainError
        If ``delta >= 1`` or ``beta >= 1`` (non-integrable endpoint).
    """
    alpha, beta, delta = float(alpha), float(beta), float(delta)
    if delta >= 1.0 or beta >= 1.0:
        raise DomainError(f"non-integrable singularity: delta={delta}, beta={beta}")
    if support is None:
        support = getattr(g, "support", None)
        breaks = tuple(getattr(g, "breaks", ())) or tuple(breaks)
    if support is None:
        raise InputError("support of g is required")
    a, b = float(support[0]), float(support[1])
    if a < 0 or not b > a:
        raise InputError(f"bad support {support}")
    u_grid = np.atleast_1d(np.asarray(u_grid, dtype=float))
    if np.any(u_grid <= 0):
        raise InputError("u_grid must be positive")
    edges = [a] + sorted(float(v) for v in breaks if a < v < b) + [b]
    out = np.zeros_like(u_grid)
    for i, u in enumerate(u_grid):
        if u <= a:
            continue
        acc = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            if lo >= u:
                break
            acc += _piece_integral(g, u, lo, min(hi, u), beta, delta, nodes)
        out[i] = u ** (-alpha) * acc
    return out


def _gl_panels(edges, nodes):
    x, w = _jacobi(nodes, 0.0, 0.0)
    pts, wts = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        pts.append(a + half * (1.0 + x))
        wts.append(half * w)
    return np.concatenate(pts), np.concatenate(wts)


def lq_norm_halfline(func, q, edges, tail_exponent=None, nodes=24):
    """``(int_0^inf |func|^q)^(1/q)`` for ``func`` supported in ``[edges[0], inf)``.

    ``func`` must be smooth between consecutive ``edges``; panels are graded
    toward each edge. Beyond ``edges[-1]`` the tail is integrated after the
    substitution ``u = U/v``: if ``|func(u)| ~ u^-tail_exponent`` the
    transformed integrand carries ``v^(q*tail_exponent - 2)``, absorbed into
    a Gauss-Jacobi weight. ``tail_exponent=None`` means no tail.
    """
    q = float(q)
    edges = sorted(float(v) for v in edges)
    fine = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        fine.extend(_graded_edges(lo, hi, True, True, ratio=0.25, depth=8)[:-1])
    fine.append(edges[-1])
    x, w = _gl_panels(fine, nodes)
    body = float(np.dot(w, np.abs(func(x)) ** q))
    tail = 0.0
    if tail_exponent is not None:
        e = q * float(tail_exponent) - 2.0
        if not e > -1.0:
            raise DomainError("tail of |f|^q is not integrable")
        U = edges[-1]
        # int_U^inf h(u) du = U int_0^1 h(U/v) v^-2 dv
        xj, wj = _jacobi(2 * nodes, 0.0, e)
        v = 0.5 * (1.0 + xj)
        vals = np.abs(func(U / v)) ** q * v ** (-2.0 - e)
        tail = U * float(np.dot(wj, vals)) * 0.5 ** (1.0 + e)
    return (body + tail) ** (1.0 / q)


def glassey_ratio(profile, alpha, beta, delta, q, r, nodes=24):
    """``(||f||_q, ||g||_r)`` for one profile; ``f`` from :func:`glassey_apply`."""
    a, b = profile.support
    edges = list(profile.edges)
    # f is smooth between the profile edges and beyond b; extend before the tail
    edges = edges + [2.0 * b, 4.0 * b]

    def f(u):
        return glassey_apply(profile, alpha, beta, delta, u, nodes=nodes)

    nf = lq_norm_halfline(f, q, edges, tail_exponent=float(alpha) + float(delta), nodes=nodes)
    x, w = _gl_panels(list(profile.edges), 2 * nodes)
    ng = float(np.dot(w, np.abs(profile(x)) ** float(r))) ** (1.0 / float(r))
    return nf, ng


@dataclass
class GlasseyScan:
    """Ratios ``||f||_q / ||g||_r`` over a profile family and its dilates."""

    conditions: GlasseyConditions
    rows: list
    max_ratio: float
    dilation_spread: float

    @property
    def violations(self):
        return self.conditions.failed

    def to_csv(self, path=None, header_comment=None):
        buf = io.StringIO()
        if header_comment:
            buf.write(f"# {header_comment}\n")
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["case_id", "lhs", "rhs", "ratio"])
        for row in self.rows:
            wr.writerow([row["case_id"], repr(row["lhs"]), repr(row["rhs"]), repr(row["ratio"])])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def glassey_ratio_scan(profiles, alpha, beta, delta, q, r, dilations=(0.25, 1.0, 4.0), nodes=24):
    """Sample the fractional-integral bound on a family of profiles.

    The conditions are checked first; if any fails, no ratio is computed
    and the scan carries the failed condition names.

    ``dilation_spread`` is the largest ``max/min`` ratio across dilates of a
    single profile (1 up to quadrature error, since the bound is scale
    invariant under the balance condition).
    """
    cond = glassey_conditions(alpha, beta, delta, q, r)
    if not cond.ok:
        return GlasseyScan(cond, [], float("nan"), float("nan"))
    rows = []
    spread = 1.0
    for prof in profiles:
        ratios = []
        for lam in dilations:
            pr = prof.dilate(lam) if lam != 1.0 else prof
            nf, ng = glassey_ratio(pr, alpha, beta, delta, q, r, nodes=nodes)
            ratio = nf / ng
            ratios.append(ratio)
            rows.append({"case_id": f"{prof.name}@{lam:g}", "lhs": nf, "rhs": ng, "ratio": ratio})
        spread = max(spread, max(ratios) / min(ratios))
    return GlasseyScan(cond, rows, max(r_["ratio"] for r_ in rows), spread)


# ------------------------------------------------------- weighted norms --

def _snapshots(traj_or_states):
    states = getattr(traj_or_states, "snapshots", traj_or_states)
    states = list(states)
    if not states:
        raise InputError("no snapshots recorded")
    ts = np.array([s.t for s in states])
    if np.any(np.diff(ts) <= 0):
        raise InputError("snapshot times must increase strictly")
    return states, ts


def weighted_norm(traj_or_states, w, t_range=None, tol=LEAK_TOLERANCE):
    """Space-time ``L^q`` norm of ``W u`` over the snapshots in ``t_range``.

    Trapezoid in ``t`` over the recorded snapshots (no interpolation at the
    ends) and the periodic trapezoid in ``x``; ``gamma = 0`` gives the plain
    norm.

    Raises
    ------
    ConeViolationError
        If a snapshot carries mass beyond the weight's cone.
    """
    states, ts = _snapshots(traj_or_states)
    lo, hi = (-np.inf, np.inf) if t_range is None else t_range
    sel = [s for s in states if lo <= s.t <= hi]
    if len(sel) < 2:
        return 0.0
    dens = np.array([w.density(s.t, s.grid.x, s.u, s.grid.dx, tol=tol) for s in sel])
    t = np.array([s.t for s in sel])
    return float(np.sum(0.5 * np.diff(t) * (dens[1:] + dens[:-1]))) ** (1.0 / w.q)


def source_weighted_norm(F, w, nodes=16, panels=8):
    """``||W F||_{L^q}`` over the support box of a source by tensor Gauss-Legendre."""
    s_lo, s_hi, y_lo, y_hi = F.box
    s_edges = np.unique(np.concatenate([np.linspace(s_lo, s_hi, panels + 1), F.s_breaks]))
    y_edges = np.unique(np.concatenate([np.linspace(y_lo, y_hi, panels + 1), F.y_breaks]))
    s, ws = _gl_panels(list(s_edges), nodes)
    y, wy = _gl_panels(list(y_edges), nodes)
    total = 0.0
    for si, wsi in zip(s, ws):
        vals = np.asarray(F(si, y), dtype=float)
        base = w.base(si, y)
        if np.any((base <= 0) & (vals != 0)):
            raise DomainError("source support leaves the weight's cone")
        wt = np.where(base > 0, np.abs(base) ** w.gamma, 0.0)
        total += wsi * float(np.dot(wy, np.abs(wt * vals) ** w.q))
    return float(total) ** (1.0 / w.q)


@dataclass
class InequalityScan:
    """Per-source ratios of the inhomogeneous weighted estimate."""

    rows: list
    skipped: list
    w_pair: tuple
    t_horizon: float

    @property
    def ratios(self):
        return [r["ratio"] for r in self.rows]

    @property
    def max_ratio(self):
        return max(self.ratios) if self.rows else float("nan")

    @property
    def min_ratio(self):
        return min(self.ratios) if self.rows else float("nan")

    def to_csv(self, path=None, header_comment=None):
        return GlasseyScan.to_csv(self, path, header_comment)


def _lhs_norm(F, w, t_horizon, grid, times, rtol):
    from .duhamel import duhamel_solve
    from .fields import FieldState

    zeros = np.zeros(grid.n)
    states = [FieldState(float(t), zeros, zeros, grid) if t <= F.box[0]
              else FieldState(float(t), duhamel_solve(F, float(t), grid, rtol=rtol), zeros, grid)
              for t in times]
    return weighted_norm(states, w, (0.0, t_horizon))


def _default_times(F, t_horizon, count):
    s0 = F.box[0]
    return np.concatenate([[s0], np.linspace(s0, t_horizon, count)[1:]])


def inhomogeneous_inequality_sample(F_corpus, w_pair, t_horizon, grid, *, times=None,
                                    count=24, rtol=1e-6, workers=1):
    """Ratio ``||W_lhs w|| / ||W_rhs F||`` for each source, ``w`` the Duhamel solution.

    Parameters
    ----------
    F_corpus : list of SourceTerm
    w_pair : (WeightSpec, WeightSpec)
        Left weight (exponent ``-alpha``, Lebesgue ``q``) and right weight
        (exponent ``beta``, Lebesgue ``q/(q-1)``).
    t_horizon : float
        The infinite time range is truncated here.
    grid : Grid1D
        Must contain the cone at ``t_horizon``.
    times : array_like, optional
        Evaluation times for the left norm; default ``count`` equispaced
        points from the source's start to the horizon.
    workers : int
        Process pool size; results do not depend on it.

    Returns
    -------
    InequalityScan
        Identically vanishing sources are skipped and listed.
    """
    w_lhs, w_rhs = w_pair
    if not isinstance(w_lhs, WeightSpec) or not isinstance(w_rhs, WeightSpec):
        raise InputError("w_pair must hold two WeightSpec")
    # Duhamel solutions of cone-interior sources live in |x| <= phi(t) - 1
    if float(char_radius(t_horizon)) - 1.0 >= grid.L:
        raise ConeOverflowError(f"support radius phi(T) - 1 at T={t_horizon} exceeds L={grid.L}")
    jobs, skipped = [], []
    for k, F in enumerate(F_corpus):
        label = F.label or f"case{k}"
        if F.is_zero():
            skipped.append(label)
            continue
        if F.box[0] >= t_horizon:
            raise InputError(f"source {label} starts after the horizon")
        ts = _default_times(F, t_horizon, count) if times is None else np.asarray(times, float)
        jobs.append((label, F, ts))
    if workers > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = [pool.submit(_lhs_norm, F, w_lhs, t_horizon, grid, ts, rtol)
                    for _, F, ts in jobs]
            lhs = [f.result() for f in futs]
    else:
        lhs = [_lhs_norm(F, w_lhs, t_horizon, grid, ts, rtol) for _, F, ts in jobs]
    rows = []
    for (label, F, _), left in zip(jobs, lhs):
        right = source_weighted_norm(F, w_rhs)
        rows.append({"case_id": label, "lhs": float(left), "rhs": float(right),
                     "ratio": float(left) / float(right)})
    return InequalityScan(rows, skipped, w_pair, float(t_horizon))
