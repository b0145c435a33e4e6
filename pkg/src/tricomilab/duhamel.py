"""Duhamel representation of ``w_tt - t w_xx = F`` with zero data.

The solution is the space-time integral of the source against the kernel

    K(t, s, x, y) = ((phi(t)+phi(s))^2 - (x-y)^2)^(-1/6) * 2F1(1/6, 1/6; 1; z)

over the backward dependence region ``|x - y| < phi(t) - phi(s)``, where
``z = ((phi(t)-phi(s))^2 - (x-y)^2) / ((phi(t)+phi(s))^2 - (x-y)^2)``,
times a single normalising constant.
"""

from dataclasses import dataclass, field
import math
from typing import Callable

import numpy as np

from .errors import AccuracyError, ConeSingularityError, InputError
from .fields import bump
from .specfun import _hyp_gg1, char_radius, gauss_hyp_unit_at_one

__all__ = [
    "KERNEL_GAMMA",
    "DUHAMEL_CONSTANT",
    "DUHAMEL_CONSTANT_CLOSED_FORM",
    "SourceTerm",
    "duhamel_kernel",
    "duhamel_solve",
    "reference_source",
    "calibrate_duhamel_constant",
]

KERNEL_GAMMA = 1.0 / 6.0

# Least-squares fit of the quadrature to the time-stepped solution for
# reference_source() at t = 3 (see calibrate_duhamel_constant).
DUHAMEL_CONSTANT = 0.5503212
# Local wave-equation limit of the kernel gives (4/3)**(1/3) / 2; the
# calibrated value above agrees to within the stepper's error.
DUHAMEL_CONSTANT_CLOSED_FORM = (4.0 / 3.0) ** (1.0 / 3.0) / 2.0

_GL_NODES = 16
_MAX_LEVEL = 5


def _inverse_radius(r):
    """Time ``s >= 0`` with ``phi(s) = r`` (``r >= 0``)."""
    return (1.5 * r) ** (2.0 / 3.0)


# module-level callables keep sources picklable for process pools
@dataclass(frozen=True)
class _BumpProduct:
    amplitude: float
    s_center: float
    s_radius: float
    y_center: float
    y_radius: float

    def __call__(self, s, y):
        return (self.amplitude * bump(s, self.s_radius, self.s_center)
                * bump(y, self.y_radius, self.y_center))


@dataclass(frozen=True)
class _Scaled:
    factor: float
    func: Callable

    def __call__(self, s, y):
        return self.factor * self.func(s, y)


@dataclass(frozen=True)
class _Sum:
    first: Callable
    second: Callable

    def __call__(self, s, y):
        return self.first(s, y) + self.second(s, y)


@dataclass(frozen=True)
class SourceTerm:
    """Source ``F(s, y)`` with a rectangular support box.

    Parameters
    ----------
    func : callable
        ``func(s, y)`` broadcasting over array arguments.
    box : (s_lo, s_hi, y_lo, y_hi)
        ``F`` vanishes outside this rectangle.
    cone_interior : bool
        Declares ``F = 0`` for ``|y| > phi(s) - 1``; checked against the box.
    s_breaks, y_breaks : tuple of float
        Interior points where ``F`` is not smooth (quadrature panel edges).
    """

    func: Callable
    box: tuple
    cone_interior: bool = True
    s_breaks: tuple = ()
    y_breaks: tuple = ()
    label: str = field(default="", compare=False)

    def __post_init__(self):
        s_lo, s_hi, y_lo, y_hi = (float(v) for v in self.box)
        if not (0.0 <= s_lo < s_hi and y_lo < y_hi):
            raise InputError(f"malformed support box {self.box}")
        object.__setattr__(self, "box", (s_lo, s_hi, y_lo, y_hi))
        if self.cone_interior and max(abs(y_lo), abs(y_hi)) > float(char_radius(s_lo)) - 1.0:
            raise InputError(
                "support box is not inside |y| <= phi(s) - 1; "
                "clear cone_interior or shrink the box")

    def __call__(self, s, y):
        return self.func(s, y)

    def is_zero(self):
        s_lo, s_hi, y_lo, y_hi = self.box
        ss = np.linspace(s_lo, s_hi, 33)[:, None]
        yy = np.linspace(y_lo, y_hi, 33)[None, :]
        return not np.any(np.asarray(self.func(ss, yy)) != 0.0)

    def scaled(self, a):
        return SourceTerm(_Scaled(a, self.func), self.box, self.cone_interior,
                          self.s_breaks, self.y_breaks, self.label)

    def __mul__(self, a):
        return self.scaled(float(a))

    __rmul__ = __mul__

    def __add__(self, other):
        f, g = self.func, other.func
        b1, b2 = self.box, other.box
        box = (min(b1[0], b2[0]), max(b1[1], b2[1]), min(b1[2], b2[2]), max(b1[3], b2[3]))
        s_breaks = set(self.s_breaks) | set(other.s_breaks) | {b1[0], b1[1], b2[0], b2[1]}
        y_breaks = set(self.y_breaks) | set(other.y_breaks) | {b1[2], b1[3], b2[2], b2[3]}
        s_breaks = tuple(sorted(v for v in s_breaks if box[0] < v < box[1]))
        y_breaks = tuple(sorted(v for v in y_breaks if box[2] < v < box[3]))
        return SourceTerm(_Sum(f, g), box,
                          self.cone_interior and other.cone_interior, s_breaks, y_breaks)

    @classmethod
    def bump_source(cls, s_center, s_radius, y_center, y_radius, amplitude=1.0, label=""):
        """Product of smooth bumps in ``s`` and ``y``."""
        func = _BumpProduct(float(amplitude), s_center, s_radius, y_center, y_radius)
        box = (s_center - s_radius, s_center + s_radius,
               y_center - y_radius, y_center + y_radius)
        return cls(func, box, True, label=label)


def reference_source():
    """Smooth source used to calibrate the kernel constant."""
    return SourceTerm.bump_source(1.8, 0.2, 0.0, 0.3, label="reference")


def _kernel_raw(P, S, d):
    a = (P + S) ** 2 - d * d
    z = ((P - S) ** 2 - d * d) / a
    z = np.clip(z, 0.0, 1.0)
    return a ** (-KERNEL_GAMMA) * _hyp_gg1(KERNEL_GAMMA, z.ravel()).reshape(z.shape)


def duhamel_kernel(t, s, x, y):
    """Kernel of the Duhamel integral (without the normalising constant).

    Raises
    ------
    ConeSingularityError
        If ``|x - y| >= phi(t) - phi(s)`` or ``s`` is outside ``[0, t)``.
    """
    t = float(t)
    s, x, y = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (s, x, y)))
    if np.any(s < 0) or np.any(s >= t):
        raise ConeSingularityError("need 0 <= s < t")
    P = char_radius(t)
    S = char_radius(s)
    d = x - y
    if np.any(np.abs(d) >= P - S):
        raise ConeSingularityError("kernel evaluated on or outside the dependence cone")
    out = _kernel_raw(P, S, d)
    return float(out) if out.ndim == 0 else out


def _s_segments(F, t, x):
    s_lo, s_hi, y_lo, y_hi = F.box
    s_hi = min(s_hi, t)
    if s_hi <= s_lo:
        return []
    P = float(char_radius(t))
    # cone edge x -/+ D(s) crossing a box edge gives a kink in s
    cuts = {s_lo, s_hi}
    cuts.update(b for b in F.s_breaks if s_lo < b < s_hi)
    for dist in (x - y_lo, y_hi - x, x - y_hi, y_lo - x):
        if 0 < dist < P:
            sc = _inverse_radius(P - dist)
            if s_lo < sc < s_hi:
                cuts.add(sc)
    for yb in F.y_breaks:
        dist = abs(x - yb)
        if 0 < dist < P:
            sc = _inverse_radius(P - dist)
            if s_lo < sc < s_hi:
                cuts.add(sc)
    cuts = sorted(cuts)
    return list(zip(cuts[:-1], cuts[1:]))


def _panel_nodes(a, b, level, gx, gw):
    m = 2 ** level
    edges = np.linspace(a, b, m + 1)
    half = 0.5 * np.diff(edges)
    mids = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mids[:, None] + half[:, None] * gx[None, :]).ravel()
    weights = (half[:, None] * gw[None, :]).ravel()
    return nodes, weights


def _integral_at(F, t, x, level, gx, gw):
    P = float(char_radius(t))
    _, _, y_lo, y_hi = F.box
    total = 0.0
    for a, b in _s_segments(F, t, x):
        ss, ws = _panel_nodes(a, b, level, gx, gw)
        D = P - char_radius(ss)
        lo = np.maximum(y_lo, x - D)
        hi = np.minimum(y_hi, x + D)
        keep = hi > lo
        if not np.any(keep):
            continue
        ss, ws, lo, hi, D = ss[keep], ws[keep], lo[keep], hi[keep], D[keep]
        # y panels: split at interior source breakpoints when present
        y_cuts = [lo] + [np.clip(np.full_like(lo, yb), lo, hi) for yb in F.y_breaks] + [hi]
        for ya, yb in zip(y_cuts[:-1], y_cuts[1:]):
            width = yb - ya
            if not np.any(width > 0):
                continue
            frac_nodes, frac_w = _panel_nodes(0.0, 1.0, level, gx, gw)
            yy = ya[:, None] + width[:, None] * frac_nodes[None, :]
            wy = width[:, None] * frac_w[None, :]
            S = char_radius(ss)[:, None]
            d = x - yy
            # open Gauss rule keeps |d| < P - S strictly
            kern = _kernel_raw(P, S, d)
            vals = kern * np.asarray(F(ss[:, None], yy), dtype=float)
            total += float(np.sum(ws[:, None] * wy * vals))
    return total


def _abs_mass(F):
    s_lo, s_hi, y_lo, y_hi = F.box
    gx, gw = np.polynomial.legendre.leggauss(_GL_NODES)
    ss, ws = _panel_nodes(s_lo, s_hi, 3, gx, gw)
    yy, wy = _panel_nodes(y_lo, y_hi, 3, gx, gw)
    vals = np.abs(np.asarray(F(ss[:, None], yy[None, :]), dtype=float))
    return float(ws @ vals @ wy)


def duhamel_solve(F, t, grid, rtol=1e-9, constant=None):
    """Evaluate the Duhamel integral ``w(t, x_j)`` on a grid.

    Tensor Gauss-Legendre quadrature in ``(s, y)``. The ``s`` range is cut
    wherever the cone edge ``x -/+ (phi(t) - phi(s))`` crosses a box edge,
    and the ``y`` range at each ``s`` is the (open) intersection of the
    dependence interval with the support. Panels are halved until two
    successive levels agree.

    Parameters
    ----------
    F : SourceTerm
    t : float
    grid : Grid1D
    rtol : float
        Target error relative to a bound on ``max |w|``.
    constant : float, optional
        Normalising constant; defaults to :data:`DUHAMEL_CONSTANT`.

    Returns
    -------
    ndarray
        ``w(t, x)`` at ``grid.x``.
    """
    c = DUHAMEL_CONSTANT if constant is None else float(constant)
    x = grid.x
    w = np.zeros(grid.n)
    t = float(t)
    if not F.cone_interior:
        raise InputError("source must be flagged cone-interior")
    s_lo, s_hi, y_lo, y_hi = F.box
    if t <= s_lo:
        return w
    mass = _abs_mass(F)
    if mass == 0.0:
        return w
    P = float(char_radius(t))
    kmax = (4.0 * P * max(float(char_radius(s_lo)), 1e-3)) ** (-KERNEL_GAMMA) \
        * gauss_hyp_unit_at_one(KERNEL_GAMMA)
    floor = rtol * kmax * mass
    reach = P - float(char_radius(s_lo))
    gx, gw = np.polynomial.legendre.leggauss(_GL_NODES)
    for j in np.nonzero((x > y_lo - reach) & (x < y_hi + reach))[0]:
        prev = _integral_at(F, t, x[j], 0, gx, gw)
        for level in range(1, _MAX_LEVEL + 1):
            cur = _integral_at(F, t, x[j], level, gx, gw)
            err = abs(cur - prev)
            prev = cur
            if err <= floor:
                break
        else:
            raise AccuracyError(
                f"Duhamel quadrature at x={x[j]:.6g} stalled", achieved=err / (kmax * mass))
        w[j] = c * cur
    return w


def calibrate_duhamel_constant(t=3.0, grid=None, cfl=0.05, rtol=1e-10):
    """Least-squares constant matching quadrature to the time stepper.

    Uses :func:`reference_source` and the semilinear solver with the
    nonlinearity switched off.

    Returns
    -------
    constant : float
    mismatch : float
        Relative L2 misfit after scaling.
    """
    from .fields import Grid1D, InitialData
    from .solver import NonlinearitySpec, StepControl, run

    grid = Grid1D(4.0, 512) if grid is None else grid
    F = reference_source()
    wq = duhamel_solve(F, t, grid, rtol=rtol, constant=1.0)
    data = InitialData(grid, np.zeros(grid.n), np.zeros(grid.n), M=1.5, epsilon=0.0)
    out = run(data, NonlinearitySpec(p=2.0, variant="none"),
              StepControl(cfl=cfl, T_end=t, dt_max=0.01), source=F,
              check_cone=False)  # zero data; the source support stays inside |x| < 2.5
    wt = out.final_state.u
    c = float(np.dot(wq, wt) / np.dot(wq, wq))
    mismatch = float(np.linalg.norm(c * wq - wt) / np.linalg.norm(wt))
    return c, mismatch
