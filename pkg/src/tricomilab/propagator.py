"""Mode-exact propagation of the linear Tricomi equation ``v_tt = t v_xx``.

Each Fourier mode obeys ``v'' + t xi^2 v = 0``. With ``k = |xi|**(2/3)`` a
fundamental system is ``Ai(-k t), Bi(-k t)`` (the Airy route). The same
solution is also written with the Kummer-type multipliers of
:func:`symbol_v1_v2` (the multiplier route); the two must agree.
"""

import math

import numpy as np

from .errors import AccuracyError, InputError
from .fields import FieldState, TrajectoryRecord
from .specfun import AI0, AIP0, BI0, BIP0, airy_arrays, char_radius, hyp0f1_neg, kummer_phi

__all__ = [
    "LinearPropagator",
    "evolve_homogeneous_exact",
    "symbol_v1_v2",
    "mode_multipliers",
    "spatial_derivative",
    "energy",
    "dx_norm_sq",
    "mean",
    "cone_leak",
    "decay_fit",
    "linear_trajectory",
]


def mode_multipliers(t, xi, route="airy"):
    """Return ``(m_f, m_g, dm_f, dm_g)`` such that
    ``v_hat(t) = m_f f_hat + m_g g_hat`` and ``v_t_hat = dm_f f_hat + dm_g g_hat``.
    """
    xi = np.abs(np.asarray(xi, dtype=float))
    t = float(t)
    if t < 0:
        raise InputError("t must be non-negative")
    if route == "airy":
        k = xi ** (2.0 / 3.0)
        ai, aip, bi, bip = airy_arrays(-k * t)
        pos = k > 0
        safe_k = np.where(pos, k, 1.0)
        m_f = math.pi * (ai * BIP0 - bi * AIP0)
        m_g = np.where(pos, math.pi / safe_k * (ai * BI0 - bi * AI0), t)
        dm_f = -k * math.pi * (aip * BIP0 - bip * AIP0)
        dm_g = np.where(pos, -math.pi * (aip * BI0 - bip * AI0), 1.0)
        out = (m_f, m_g, dm_f, dm_g)
        if not all(np.all(np.isfinite(a)) for a in out):
            raise AccuracyError("Airy multipliers overflowed")
        return out
    if route == "kummer":
        x = char_radius(t) * xi
        xi2 = xi * xi
        m_f = hyp0f1_neg(2.0 / 3.0, x)
        m_g = t * hyp0f1_neg(4.0 / 3.0, x)
        dm_f = -0.5 * t * t * xi2 * hyp0f1_neg(5.0 / 3.0, x)
        dm_g = hyp0f1_neg(4.0 / 3.0, x) - 0.25 * t ** 3 * xi2 * hyp0f1_neg(7.0 / 3.0, x)
        return m_f, m_g, dm_f, dm_g
    raise ValueError(f"unknown route {route!r}")


def symbol_v1_v2(t, xi):
    """Kummer-form symbols of the linear solution operator.

    ``V1 = exp(-z/2) Phi(1/6, 1/3; z)`` and
    ``V2 = t exp(-z/2) Phi(5/6, 5/3; z)`` with ``z = 2i phi(t) |xi|``, so
    that ``v_hat(t, xi) = V1 f_hat + V2 g_hat``.

    Parameters
    ----------
    t : float
        Time, ``t >= 0``.
    xi : float or array_like
        Frequency.

    Returns
    -------
    V1, V2 : complex or ndarray of complex
    """
    t = float(t)
    if t < 0:
        raise InputError("t must be non-negative")
    z = 2j * float(char_radius(t)) * np.abs(np.asarray(xi, dtype=float))
    damp = np.exp(-0.5 * z)
    v1 = damp * kummer_phi(1.0 / 6.0, 1.0 / 3.0, z)
    v2 = t * damp * kummer_phi(5.0 / 6.0, 5.0 / 3.0, z)
    return v1, v2


class LinearPropagator:
    """Exact solution operator for fixed initial data.

    Caches the data transforms so repeated evaluation at many times costs
    two inverse FFTs each.
    """

    def __init__(self, data, route="airy"):
        self.data = data
        self.grid = data.grid
        self.route = route
        self._fh = np.fft.rfft(data.f)
        self._gh = np.fft.rfft(data.g)

    def __call__(self, t):
        t = float(t)
        self.grid.require_cone(self.data.M, t)
        if t == 0.0:
            return FieldState(0.0, self.data.f, self.data.g, self.grid, self.data.M)
        m_f, m_g, dm_f, dm_g = mode_multipliers(t, self.grid.xi, self.route)
        n = self.grid.n
        u = np.fft.irfft(m_f * self._fh + m_g * self._gh, n)
        ut = np.fft.irfft(dm_f * self._fh + dm_g * self._gh, n)
        return FieldState(t, u, ut, self.grid, self.data.M)


def evolve_homogeneous_exact(data, t, grid=None, route="airy"):
    """Solve ``v_tt - t v_xx = 0`` with ``v(0) = f``, ``v_t(0) = g``.

    Parameters
    ----------
    data : InitialData
    t : float
        Target time, ``t >= 0``.
    grid : Grid1D, optional
        Must equal ``data.grid`` when given.
    route : {"airy", "kummer"}
        Mode multipliers from the Airy pair or from the Kummer symbols.

    Returns
    -------
    FieldState

    Raises
    ------
    ConeOverflowError
        If ``M + phi(t)`` reaches the box half-width.
    """
    if grid is not None and grid != data.grid:
        raise InputError("grid does not match the data grid")
    return LinearPropagator(data, route)(t)


def spatial_derivative(u, grid, order=1):
    uh = np.fft.rfft(u)
    ik = 1j * grid.xi
    if order % 2 == 1 and grid.n % 2 == 0:
        ik = ik.copy()
        ik[-1] = 0.0
    return np.fft.irfft(ik ** order * uh, grid.n)


def dx_norm_sq(state):
    """``||v_x||_2^2`` by spectral differentiation."""
    ux = spatial_derivative(state.u, state.grid)
    return float(np.sum(ux * ux) * state.grid.dx)


def energy(state):
    """``E = int (v_t^2 + t v_x^2) dx``; grows at rate ``||v_x||^2``."""
    return float(np.sum(state.ut ** 2) * state.grid.dx) + state.t * dx_norm_sq(state)


def mean(state):
    return float(np.sum(state.u) * state.grid.dx)


def cone_leak(state, pad_cells=2):
    """Relative L2 mass of ``u`` outside ``|x| <= M + phi(t) + pad*dx``."""
    total = float(np.sum(state.u ** 2))
    if total == 0.0:
        return 0.0
    outside = ~state.cone_mask(pad_cells * state.grid.dx)
    return math.sqrt(float(np.sum(state.u[outside] ** 2)) / total)


def decay_fit(record, t_window):
    """Least-squares slope of ``log supnorm`` against ``log t``.

    Parameters
    ----------
    record : TrajectoryRecord
    t_window : (float, float)

    Returns
    -------
    slope, r2 : float
    """
    lo, hi = t_window
    sel = record.window(lo, hi) & np.isfinite(record.supnorm) & (record.supnorm > 0)
    if lo <= 0 or np.count_nonzero(sel) < 20:
        raise InputError(
            f"decay fit needs >= 20 positive samples in [{lo}, {hi}], "
            f"found {int(np.count_nonzero(sel))}")
    lx = np.log(record.t[sel])
    ly = np.log(record.supnorm[sel])
    slope, icept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + icept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid ** 2)) / ss_tot
    return float(slope), float(r2)


def linear_trajectory(data, times, route="airy", keep_snapshots=False):
    """Diagnostics of the exact linear evolution at the given times."""
    prop = LinearPropagator(data, route)
    states = (prop(t) for t in times)
    return TrajectoryRecord.from_states(states, energy, cone_leak,
                                        keep_snapshots=keep_snapshots)
