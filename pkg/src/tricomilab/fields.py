"""Grids, initial data, field snapshots and diagnostic records."""

from dataclasses import dataclass, field
import csv
import math

import numpy as np

from .errors import ConeOverflowError, InputError
from .specfun import char_radius

__all__ = [
    "Grid1D",
    "InitialData",
    "FieldState",
    "TrajectoryRecord",
    "bump",
    "write_snapshot_csv",
    "DIAGNOSTIC_COLUMNS",
]

DIAGNOSTIC_COLUMNS = ("t", "supnorm", "mean", "energy", "cone_leak")


def bump(x, radius=1.0, center=0.0):
    """C-infinity bump ``exp(1 - 1/(1 - r**2))`` with peak value 1."""
    x = np.asarray(x, dtype=float)
    r = (x - center) / radius
    out = np.zeros_like(r)
    inside = np.abs(r) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - r[inside] ** 2))
    return out


def _frozen(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Grid1D:
    """Periodic grid on ``[-L, L)`` with ``n`` points (a power of two)."""

    L: float
    n: int

    def __post_init__(self):
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 16
                and self.n & (self.n - 1) == 0):
            raise InputError(f"n must be a power of two >= 16, got {self.n}")
        if not (self.L > 0 and math.isfinite(self.L)):
            raise InputError(f"L must be positive, got {self.L}")

    @property
    def dx(self):
        return 2.0 * self.L / self.n

    @property
    def x(self):
        return -self.L + self.dx * np.arange(self.n)

    @property
    def xi(self):
        """Angular wavenumbers of the real FFT."""
        return 2.0 * np.pi * np.fft.rfftfreq(self.n, self.dx)

    def contains_cone(self, M, t_end):
        return self.L > M + float(char_radius(t_end))

    def require_cone(self, M, t_end):
        if not self.contains_cone(M, t_end):
            raise ConeOverflowError(
                f"cone radius M + phi(T) = {M + float(char_radius(t_end)):.6g} "
                f"reaches the box half-width L = {self.L}")

    def reflect_index(self):
        """Index map ``j -> k`` with ``x_k = -x_j`` on the periodic grid."""
        return (-np.arange(self.n)) % self.n

    @classmethod
    def for_spacing(cls, M, t_end, dx, margin=2.0):
        """Power-of-two grid with spacing exactly ``dx`` containing the cone."""
        half = M + float(char_radius(t_end)) + margin
        n = 16
        while n * dx < 2.0 * half:
            n *= 2
        return cls(L=0.5 * n * dx, n=n)

    @classmethod
    def for_horizon(cls, M, t_end, dx, margin=2.0):
        """Smallest power-of-two grid with spacing <= dx containing the cone."""
        half = M + float(char_radius(t_end)) + margin
        n = 16
        while 2.0 * half / n > dx:
            n *= 2
        return cls(L=half, n=n)


@dataclass(frozen=True)
class InitialData:
    """Compactly supported data ``u(0) = eps*u0``, ``u_t(0) = eps*u1``.

    Attributes
    ----------
    u0, u1 : ndarray
        Unscaled profiles sampled on ``grid``; zero for ``|x| > M``.
    M : float
        Support radius, greater than one.
    epsilon : float
        Amplitude.
    """

    grid: Grid1D
    u0: np.ndarray
    u1: np.ndarray
    M: float
    epsilon: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "u0", _frozen(self.u0))
        object.__setattr__(self, "u1", _frozen(self.u1))
        n = self.grid.n
        if self.u0.shape != (n,) or self.u1.shape != (n,):
            raise InputError("profiles must match the grid size")
        if not self.M > 1.0:
            raise InputError(f"support radius M must exceed 1, got {self.M}")
        if not (np.all(np.isfinite(self.u0)) and np.all(np.isfinite(self.u1))):
            raise InputError("profiles must be finite")
        outside = np.abs(self.grid.x) > self.M
        if np.any(np.abs(self.u0[outside]) >= 1e-12) or np.any(np.abs(self.u1[outside]) >= 1e-12):
            raise InputError(f"profiles do not vanish outside |x| <= {self.M}")
        if self.M >= self.grid.L:
            raise ConeOverflowError("support radius exceeds the box")

    @property
    def f(self):
        return self.epsilon * self.u0

    @property
    def g(self):
        return self.epsilon * self.u1

    @classmethod
    def bumps(cls, grid, M=2.0, epsilon=1.0, radius=None, a0=1.0, a1=1.0):
        """Even bump profiles ``a0*b(x)``, ``a1*b(x)`` of the given radius."""
        radius = M if radius is None else radius
        if radius > M:
            raise InputError("bump radius larger than the support radius")
        b = bump(grid.x, radius)
        return cls(grid, a0 * b, a1 * b, M, epsilon)

    def initial_state(self):
        return FieldState(0.0, self.f, self.g, self.grid, self.M)


@dataclass(frozen=True)
class FieldState:
    """Immutable snapshot ``(u, u_t)`` at time ``t``.

    ``M`` is the support radius of the data the state evolved from; it fixes
    the cone ``|x| <= M + phi(t)``.
    """

    t: float
    u: np.ndarray
    ut: np.ndarray
    grid: Grid1D
    M: float = None

    def __post_init__(self):
        object.__setattr__(self, "u", _frozen(self.u))
        object.__setattr__(self, "ut", _frozen(self.ut))
        object.__setattr__(self, "t", float(self.t))

    @property
    def finite(self):
        return bool(np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.ut)))

    @property
    def cone_radius(self):
        if self.M is None:
            raise InputError("state carries no support radius")
        return self.M + float(char_radius(self.t))

    def cone_mask(self, pad=0.0):
        return np.abs(self.grid.x) <= self.cone_radius + pad


def write_snapshot_csv(path, states, header_comment=None):
    """Write one or more states as CSV rows ``t,x,u,ut``."""
    if isinstance(states, FieldState):
        states = [states]
    with open(path, "w", newline="") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "x", "u", "ut"])
        for s in states:
            for xv, uv, vv in zip(s.grid.x, s.u, s.ut):
                w.writerow([repr(s.t), repr(float(xv)), repr(float(uv)), repr(float(vv))])


@dataclass
class TrajectoryRecord:
    """Time series of diagnostics along one evolution.

    Every column is a 1-D array of equal length. ``weighted`` holds the
    running space-time sum ``int int |W u|^q`` when a weight was supplied.
    """

    t: np.ndarray
    supnorm: np.ndarray
    mean: np.ndarray
    energy: np.ndarray
    cone_leak: np.ndarray
    G1: np.ndarray = None
    nonlinear: np.ndarray = None
    weighted: np.ndarray = None
    snapshots: list = field(default_factory=list)
    M: float = None

    def __post_init__(self):
        n = len(self.t)
        for name in ("t", "supnorm", "mean", "energy", "cone_leak", "G1", "nonlinear", "weighted"):
            val = getattr(self, name)
            if val is None:
                val = np.full(n, np.nan)
            val = np.asarray(val, dtype=float)
            if val.shape != (n,):
                raise InputError(f"column {name} has length {val.shape}, expected {n}")
            setattr(self, name, val)

    def __len__(self):
        return len(self.t)

    @property
    def G(self):
        return self.mean

    def window(self, t_lo, t_hi):
        """Boolean mask of samples with ``t_lo <= t <= t_hi``."""
        return (self.t >= t_lo) & (self.t <= t_hi)

    def to_csv(self, path, header_comment=None):
        with open(path, "w", newline="") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(DIAGNOSTIC_COLUMNS)
            for row in zip(self.t, self.supnorm, self.mean, self.energy, self.cone_leak):
                w.writerow([repr(float(v)) for v in row])

    @classmethod
    def from_states(cls, states, energy_fn, leak_fn, G1_fn=None, keep_snapshots=False):
        states = list(states)
        rec = cls(
            t=[s.t for s in states],
            supnorm=[float(np.max(np.abs(s.u))) for s in states],
            mean=[float(np.sum(s.u) * s.grid.dx) for s in states],
            energy=[energy_fn(s) for s in states],
            cone_leak=[leak_fn(s) for s in states],
            G1=None if G1_fn is None else [G1_fn(s) for s in states],
            snapshots=states if keep_snapshots else [],
            M=states[0].M if states else None,
        )
        return rec
