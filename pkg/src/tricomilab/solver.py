"""Pseudo-spectral time stepping of ``u_tt - t u_xx = N(t, u) + F(t, x)``.

Kick-drift-kick leapfrog on the periodic grid. The step obeys
``dt * sqrt(t + dt) <= cfl * dx``, which bounds ``dt`` by
``cfl * dx / max(sqrt(t), sqrt(dt))`` and needs no special case at ``t = 0``,
where the first kick-drift reproduces the Taylor start
``u(dt) = u0 + dt*u1 + dt^2/2 * N(0, u0)``.

The default ``"corrected"`` scheme kicks with the symbol
``(2/dt)^2 sin^2(sqrt(t) xi dt / 2)`` instead of ``t xi^2``: leapfrog then
reproduces the exact frequency of each mode for frozen ``t``, removing the
phase error that otherwise erodes wave fronts over long horizons. It stays
second order; ``"verlet"`` selects the plain symbol.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import InputError
from .fields import FieldState, TrajectoryRecord
from .propagator import cone_leak
from .specfun import airy_lambda_scaled, char_radius

__all__ = [
    "NonlinearitySpec",
    "StepControl",
    "RunOutcome",
    "PicardReport",
    "cutoff_chi",
    "run",
    "picard_iterate",
    "estimate_blowup_time",
]

COMPLETED = "completed"
BLOWUP = "blowup_detected"
ABORT = "accuracy_abort"


def _smooth_step(x):
    # exp(-1/x) / (exp(-1/x) + exp(-1/(1-x))), C-infinity, 0 below 0 and 1 above 1
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(x > 0.0, np.exp(-1.0 / np.where(x > 0.0, x, 1.0)), 0.0)
        b = np.where(x < 1.0, np.exp(-1.0 / np.where(x < 1.0, 1.0 - x, 1.0)), 0.0)
    out = a / (a + b)
    return float(out) if out.ndim == 0 else out


def cutoff_chi(t, T0):
    """Smooth switch: 0 for ``t <= T0/2``, 1 for ``t >= T0``."""
    return _smooth_step((np.asarray(t, dtype=float) - 0.5 * T0) / (0.5 * T0))


@dataclass(frozen=True)
class NonlinearitySpec:
    """Right-hand side ``N(t, u)``.

    ``variant`` is ``"pure"`` for ``|u|^p``, ``"cutoff"`` for
    ``(1 - chi(t)) u (1 + u^2)^((p-1)/2) + chi(t) |u|^p`` and ``"none"``
    for the linear equation.
    """

    p: float
    variant: str = "pure"
    T0: float = 0.5

    def __post_init__(self):
        if not self.p > 1.0:
            raise InputError(f"p must exceed 1, got {self.p}")
        if self.variant not in ("pure", "cutoff", "none"):
            raise InputError(f"unknown variant {self.variant!r}")
        if not 0.0 < self.T0 < 1.0:
            raise InputError(f"T0 must lie in (0, 1), got {self.T0}")

    def smooth_part(self, u):
        return u * (1.0 + u * u) ** (0.5 * (self.p - 1.0))

    def __call__(self, t, u):
        if self.variant == "none":
            return np.zeros_like(u)
        power = np.abs(u) ** self.p
        if self.variant == "pure":
            return power
        chi = cutoff_chi(t, self.T0)
        if chi == 1.0:
            return power
        if chi == 0.0:
            return self.smooth_part(u)
        return (1.0 - chi) * self.smooth_part(u) + chi * power

    def slope_bound(self, umax):
        """Upper bound of ``|dN/du|`` for ``|u| <= umax``."""
        if self.variant == "none":
            return 0.0
        if self.variant == "pure":
            return self.p * umax ** (self.p - 1.0)
        return self.p * (1.0 + umax * umax) ** (0.5 * (self.p - 1.0))


@dataclass(frozen=True)
class StepControl:
    """Step-size policy and stopping rules."""

    cfl: float = 0.4
    T_end: float = 1.0
    dt_min: float = 1e-10
    blowup_threshold: float = 1e6
    dt_max: float = 0.05
    record_stride: int = 1
    scheme: str = "corrected"

    def __post_init__(self):
        if self.scheme not in ("corrected", "verlet"):
            raise InputError(f"unknown scheme {self.scheme!r}")
        if not 0.0 < self.cfl < 1.0:
            raise InputError(f"cfl must lie in (0, 1), got {self.cfl}")
        if not self.T_end > 0:
            raise InputError("T_end must be positive")
        if not (self.dt_min > 0 and self.dt_max > self.dt_min):
            raise InputError("need 0 < dt_min < dt_max")
        if not self.blowup_threshold > 0:
            raise InputError("blowup_threshold must be positive")
        if int(self.record_stride) < 1:
            raise InputError("record_stride must be >= 1")

    def wave_dt(self, t, dx):
        """Largest ``dt`` with ``dt * sqrt(t + dt) <= cfl * dx``."""
        c = self.cfl * dx
        dt = c ** (2.0 / 3.0) if t <= 0 else min(c / math.sqrt(t), c ** (2.0 / 3.0))
        for _ in range(60):
            nxt = c / math.sqrt(t + dt)
            if abs(nxt - dt) <= 1e-15 * dt:
                break
            dt = nxt
        return min(dt * (1.0 - 1e-12), self.dt_max)


def _kick_symbol(t, xi, dt, scheme):
    if scheme == "verlet" or dt == 0.0:
        return t * xi * xi
    return (2.0 / dt * np.sin(0.5 * math.sqrt(t) * dt * xi)) ** 2


@dataclass
class RunOutcome:
    status: str
    blowup_time_estimate: float
    trajectory: TrajectoryRecord
    final_state: FieldState
    steps: int
    message: str = ""

    def __post_init__(self):
        if (self.blowup_time_estimate is not None) != (self.status == BLOWUP):
            raise ValueError("blowup estimate must be present iff blowup was detected")


class _Recorder:
    def __init__(self, grid, M, forcing, weight):
        self.grid, self.M, self.forcing, self.weight = grid, M, forcing, weight
        self.rows = []
        self.snapshots = []
        self._wsum = 0.0
        self._last = None

    def g1(self, t, u):
        scaled, _ = airy_lambda_scaled(t)
        x = self.grid.x
        inside = np.abs(x) <= self.M + float(char_radius(t))
        if scaled == 0.0:
            return 0.0
        e = np.exp(x[inside] - float(char_radius(t)) + math.log(scaled))
        return float(np.sum(u[inside] * e) * self.grid.dx)

    def add(self, t, u, ut, uxx_hat=None):
        dx = self.grid.dx
        if uxx_hat is None:
            uxx_hat = -self.grid.xi ** 2 * np.fft.rfft(u)
        # int u_x^2 = -int u u_xx on the periodic grid
        uxx = np.fft.irfft(uxx_hat, self.grid.n)
        energy = float(np.sum(ut * ut) * dx - t * np.sum(u * uxx) * dx)
        state = FieldState(t, u, ut, self.grid, self.M)
        wd = np.nan
        if self.weight is not None:
            dens = self.weight.density(t, self.grid.x, u, dx)
            if self._last is not None:
                self._wsum += 0.5 * (t - self._last[0]) * (dens + self._last[1])
            self._last = (t, dens)
            wd = self._wsum
        self.rows.append((
            t, float(np.max(np.abs(u))), float(np.sum(u) * dx), energy,
            cone_leak(state), self.g1(t, u),
            float(np.sum(self.forcing(t, u)) * dx), wd))

    def record(self):
        cols = list(zip(*self.rows)) if self.rows else [[]] * 8
        return TrajectoryRecord(
            t=cols[0], supnorm=cols[1], mean=cols[2], energy=cols[3], cone_leak=cols[4],
            G1=cols[5], nonlinear=cols[6], weighted=cols[7],
            snapshots=self.snapshots, M=self.M)


def run(data, nl, ctl, grid=None, *, source=None, dealias=False, snapshot_times=(),
        weight=None, check_cone=True):
    """Integrate the semilinear equation from the data at ``t = 0``.

    Parameters
    ----------
    data : InitialData
    nl : NonlinearitySpec
    ctl : StepControl
    grid : Grid1D, optional
        Must equal ``data.grid`` when given.
    source : SourceTerm, optional
        Additional forcing ``F(t, x)``.
    dealias : bool
        Apply the 2/3 rule to the nonlinear term. Off by default: truncating
        a non-bandlimited forcing rings across the whole box.
    snapshot_times : sequence of float
        Times at which full states are stored (steps land on them exactly).
    weight : WeightSpec, optional
        Accumulate the running space-time integral ``int int |W u|^q``.

    Returns
    -------
    RunOutcome
    """
    if grid is not None and grid != data.grid:
        raise InputError("grid does not match the data grid")
    grid = data.grid
    if check_cone:
        grid.require_cone(data.M, ctl.T_end)
    n, dx, x, xi = grid.n, grid.dx, grid.x, grid.xi
    keep = np.abs(xi) <= (2.0 / 3.0) * xi[-1] if dealias else None

    def forcing(t, u):
        out = np.zeros(n)
        if nl.variant != "none":
            nonl = nl(t, u)
            if dealias:
                nonl = np.fft.irfft(np.fft.rfft(nonl) * keep, n)
            out += nonl
        if source is not None:
            out += np.asarray(source(t, x), dtype=float)
        return out

    def kick(t, uh, force, dt):
        return np.fft.irfft(-_kick_symbol(t, xi, dt, ctl.scheme) * uh, n) + force

    snap_set = {float(s) for s in snapshot_times if 0.0 <= s <= ctl.T_end}
    targets = sorted(snap_set | {float(ctl.T_end)})
    u = np.array(data.f, dtype=float)
    v = np.array(data.g, dtype=float)
    t = 0.0
    rec = _Recorder(grid, data.M, nl, weight)
    uh = np.fft.rfft(u)
    force = forcing(t, u)
    rec.add(t, u, v, -xi * xi * uh)
    if 0.0 in snap_set:
        rec.snapshots.append(FieldState(t, u, v, grid, data.M))
    if targets[0] == 0.0:
        targets.pop(0)
    steps = 0
    sup_hist = [float(np.max(np.abs(u)))]
    status, message = COMPLETED, ""
    while targets:
        target = targets[0]
        dt = ctl.wave_dt(t, dx)
        slope = nl.slope_bound(sup_hist[-1])
        if slope > 0:
            dt = min(dt, ctl.cfl / math.sqrt(slope))
        if dt < ctl.dt_min:
            growing = len(sup_hist) > 10 and all(
                b > a for a, b in zip(sup_hist[-11:-1], sup_hist[-10:]))
            status = BLOWUP if growing else ABORT
            message = f"step size {dt:.3g} below dt_min at t={t:.6g}"
            break
        landed = t + dt >= target - 1e-12 * max(1.0, target)
        if landed:
            dt = target - t
        v += 0.5 * dt * kick(t, uh, force, dt)
        u += dt * v
        t = target if landed else t + dt
        uh = np.fft.rfft(u)
        force = forcing(t, u)
        v += 0.5 * dt * kick(t, uh, force, dt)
        steps += 1
        umax = float(np.max(np.abs(u)))
        sup_hist.append(umax)
        if len(sup_hist) > 64:
            del sup_hist[:-32]
        if not (math.isfinite(umax) and np.all(np.isfinite(v))):
            status, message = ABORT, f"non-finite field at t={t:.6g}"
            break
        if landed:
            if target in snap_set:
                rec.snapshots.append(FieldState(t, u, v, grid, data.M))
            targets.pop(0)
        if umax > ctl.blowup_threshold:
            rec.add(t, u, v, -xi * xi * uh)
            status = BLOWUP
            message = f"sup-norm {umax:.3g} exceeded threshold at t={t:.6g}"
            break
        # growth of 1% since the last row forces a row: blowup tails stay resolved
        if landed or steps % ctl.record_stride == 0 or umax > 1.01 * rec.rows[-1][1]:
            rec.add(t, u, v, -xi * xi * uh)
    if rec.rows[-1][0] != t and np.all(np.isfinite(u)) and np.all(np.isfinite(v)):
        rec.add(t, u, v, -xi * xi * uh)
    traj = rec.record()
    final = FieldState(t, u, v, grid, data.M)
    estimate = None
    if status == BLOWUP:
        try:
            estimate = estimate_blowup_time(traj, nl.p, quantity="supnorm")
        except InputError:
            estimate = t
    return RunOutcome(status, estimate, traj, final, steps, message)


def estimate_blowup_time(trajectory, p, quantity="G", window=20):
    """Extrapolate the blowup time from the tail of a growing series.

    For Riccati-type growth ``Q(t) ~ (T* - t)^(-2/(p-1))`` the transform
    ``Q^(-(p-1)/2)`` is linear in ``t`` and vanishes at ``T*``; a straight
    line is fitted to the last ``window`` samples.

    Parameters
    ----------
    trajectory : TrajectoryRecord
    p : float
    quantity : {"G", "supnorm"}
        Column to extrapolate.
    window : int
        Number of trailing samples used (at least 10 are required).

    Raises
    ------
    InputError
        If the tail is not positive and strictly increasing, or shows no
        finite-time growth.
    """
    col = trajectory.mean if quantity == "G" else trajectory.supnorm
    if quantity not in ("G", "supnorm"):
        raise InputError(f"unknown quantity {quantity!r}")
    t = np.asarray(trajectory.t, dtype=float)
    q = np.asarray(col, dtype=float)
    k = min(window, len(t))
    if k < 10:
        raise InputError("need at least 10 samples")
    t, q = t[-k:], q[-k:]
    if not (np.all(np.isfinite(q)) and np.all(q > 0) and np.all(np.diff(q) > 0)
            and np.all(np.diff(t) > 0)):
        raise InputError("series is not positive and strictly increasing on the tail")
    y = q ** (-(p - 1.0) / 2.0)
    slope, icept = np.polyfit(t - t[-1], y, 1)
    if slope >= 0:
        raise InputError("no finite-time growth")
    t_star = t[-1] - icept / slope
    span = t[-1] - t[0]
    if not math.isfinite(t_star) or t_star - t[-1] > span:
        raise InputError("extrapolated blowup lies beyond the sampled horizon; series looks bounded")
    return float(t_star)


@dataclass
class PicardReport:
    """Weighted sizes of the Picard iterates on ``[T0/2, T_num]``.

    ``M[k]`` is the weighted norm of ``u_k`` and ``N[k]`` that of
    ``u_k - u_{k-1}`` (with ``u_{-1} = 0``).
    """

    M: list
    N: list
    ratios: list
    max_ratio: float
    contraction_failed: bool
    horizon: tuple
    steps: int
    message: str = ""
    params: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "M": [float(v) for v in self.M],
            "N": [float(v) for v in self.N],
            "ratios": [float(v) for v in self.ratios],
            "max_ratio": float(self.max_ratio),
            "contraction_failed": bool(self.contraction_failed),
            "horizon": [float(v) for v in self.horizon],
            "steps": int(self.steps),
            "message": self.message,
            "params": self.params,
        }


def picard_iterate(data, nl, k_max, weight, *, T_num=50.0, cfl=0.4, dt_max=0.05,
                   dealias=False, blowup_threshold=1e6, scheme="corrected"):
    """Run ``u_k'' - t u_k,xx = N(t, u_{k-1})`` for ``k = 0..k_max``.

    All iterates share the initial data and are marched together from
    ``t = 0`` on one step sequence; the weighted space-time norms are
    accumulated over ``[T0/2, T_num]``.

    Parameters
    ----------
    data : InitialData
    nl : NonlinearitySpec
    k_max : int
        Index of the last iterate.
    weight : WeightSpec
    T_num : float
        Finite horizon replacing the infinite time interval.

    Returns
    -------
    PicardReport
    """
    if k_max < 1:
        raise InputError("k_max must be at least 1")
    grid = data.grid
    grid.require_cone(data.M, T_num)
    ctl = StepControl(cfl=cfl, T_end=T_num, dt_max=dt_max,
                      blowup_threshold=blowup_threshold, scheme=scheme)
    K = k_max + 1
    n, dx, x, xi = grid.n, grid.dx, grid.x, grid.xi
    keep = np.abs(xi) <= (2.0 / 3.0) * xi[-1] if dealias else None
    t_lo = 0.5 * nl.T0

    def forcing(t, U):
        out = np.zeros_like(U)
        src = nl(t, U[:-1])
        if dealias:
            src = np.fft.irfft(np.fft.rfft(src, axis=1) * keep, n, axis=1)
        out[1:] = src
        return out

    def kick(t, Uh, force, dt):
        return np.fft.irfft(-_kick_symbol(t, xi, dt, scheme) * Uh, n, axis=1) + force

    def densities(t, U):
        m = np.array([weight.density(t, x, U[k], dx) for k in range(K)])
        d = np.empty(K)
        d[0] = m[0]
        for k in range(1, K):
            # support of the increment lies in that of the two iterates checked above
            d[k] = weight.density(t, x, U[k] - U[k - 1], dx, tol=np.inf)
        return m, d

    U = np.tile(np.asarray(data.f, dtype=float), (K, 1))
    V = np.tile(np.asarray(data.g, dtype=float), (K, 1))
    t = 0.0
    Uh = np.fft.rfft(U, axis=1)
    force = forcing(t, U)
    msum = np.zeros(K)
    nsum = np.zeros(K)
    prev = None
    steps = 0
    message = ""
    failed = False
    targets = [t_lo, T_num]
    while targets:
        target = targets[0]
        # each iterate solves a linear problem with an explicit source: no amplitude cap on dt
        dt = ctl.wave_dt(t, dx)
        landed = t + dt >= target - 1e-12 * max(1.0, target)
        if landed:
            dt = target - t
        V += 0.5 * dt * kick(t, Uh, force, dt)
        U += dt * V
        t = target if landed else t + dt
        Uh = np.fft.rfft(U, axis=1)
        force = forcing(t, U)
        V += 0.5 * dt * kick(t, Uh, force, dt)
        steps += 1
        if landed:
            targets.pop(0)
        umax = float(np.max(np.abs(U)))
        if not math.isfinite(umax) or umax > blowup_threshold:
            failed = True
            message = f"iterates left the bounded regime at t={t:.6g}"
            break
        if t >= t_lo:
            m, d = densities(t, U)
            if prev is not None:
                msum += 0.5 * (t - prev[0]) * (m + prev[1])
                nsum += 0.5 * (t - prev[0]) * (d + prev[2])
            prev = (t, m, d)
    q = weight.q
    M_k = msum ** (1.0 / q)
    N_k = nsum ** (1.0 / q)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(N_k[:-1] > 0, N_k[1:] / N_k[:-1], np.inf)
    growth = 0
    for r in ratios:
        growth = growth + 1 if r > 1.0 else 0
        if growth >= 3:
            failed = True
            message = message or "increments grew for three consecutive iterations"
    return PicardReport(
        M=[float(v) for v in M_k], N=[float(v) for v in N_k], ratios=[float(v) for v in ratios],
        max_ratio=float(np.max(ratios)) if len(ratios) else float("nan"),
        contraction_failed=failed, horizon=(t_lo, T_num), steps=steps, message=message,
        params={"p": nl.p, "epsilon": data.epsilon, "k_max": k_max, "gamma": weight.gamma,
                "q": q, "M": weight.M, "cfl": cfl})
