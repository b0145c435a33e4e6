"""Special functions for the Tricomi operator.

Modified Bessel K by trapezoidal quadrature of its integral representation,
the decaying Airy-type solution of ``y'' = t y`` normalised to one at the
origin, the Airy pair, Kummer's function on the imaginary axis for the two
parameter pairs that occur in the mode symbols, and the Gauss function
``2F1(g, g; 1; z)`` that appears in the Duhamel kernel.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import integrate, special

from .errors import AccuracyError, DomainError

__all__ = [
    "EvalDomain",
    "AiryPairValue",
    "AI0",
    "AIP0",
    "BI0",
    "BIP0",
    "char_radius",
    "bessel_k",
    "airy_lambda",
    "airy_lambda_prime",
    "airy_lambda_scaled",
    "airy_pair",
    "airy_arrays",
    "hyp0f1_neg",
    "kummer_phi",
    "gauss_hyp_unit",
    "gauss_hyp_unit_euler",
    "gauss_hyp_unit_at_one",
]

AI0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
AIP0 = -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0)
BI0 = 3.0 ** (-1.0 / 6.0) / math.gamma(2.0 / 3.0)
BIP0 = 3.0 ** (1.0 / 6.0) / math.gamma(1.0 / 3.0)

_K_STEP = 0.05
_K_TAIL = 41.5          # -log(1e-18)
_K_ASYMPTOTIC_FROM = 30.0
_SERIES_SEAM = 30.0     # |z| for Kummer; 0F1 argument x = |z|/2
_KUMMER_PAIRS = ((1.0 / 6.0, 1.0 / 3.0), (5.0 / 6.0, 5.0 / 3.0))


def char_radius(t):
    """Characteristic radius ``(2/3) t**1.5`` of the Tricomi cone."""
    return (2.0 / 3.0) * np.power(t, 1.5)


@dataclass(frozen=True)
class EvalDomain:
    """Argument range and tolerances for a special-function table."""

    t_min: float
    t_max: float
    abs_tol: float = 1e-14
    rel_tol: float = 1e-12

    def __post_init__(self):
        if not (self.t_min >= 0.0 and self.t_min < self.t_max):
            raise DomainError("need 0 <= t_min < t_max")
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise DomainError("tolerances must be positive")

    def grid(self, n):
        return np.linspace(self.t_min, self.t_max, n)


@dataclass(frozen=True)
class AiryPairValue:
    """Airy functions and derivatives at one argument.

    ``saturated`` is set when Bi or Bi' overflow double precision.
    """

    ai: float
    bi: float
    ai_prime: float
    bi_prime: float
    argument: float
    saturated: bool = False

    @property
    def wronskian(self):
        return self.ai * self.bi_prime - self.ai_prime * self.bi


# ---------------------------------------------------------------- Bessel K

def _kv_quadrature(nu, t):
    # integrand scaled by e^t so large t stays representable
    z_end = math.acosh(1.0 + _K_TAIL / t) + 1.0
    while t * (math.cosh(z_end) - 1.0) - abs(nu) * z_end < _K_TAIL:
        z_end += 0.5
    n = int(math.ceil(z_end / _K_STEP))
    n += n % 2
    z = np.arange(n + 1) * _K_STEP
    f = np.exp(-t * (np.cosh(z) - 1.0)) * np.cosh(nu * z)
    fine = _K_STEP * (f.sum() - 0.5 * f[0] - 0.5 * f[-1])
    coarse = 2.0 * _K_STEP * (f[::2].sum() - 0.5 * f[0] - 0.5 * f[-1])
    err = abs(fine - coarse)
    if err > 1e-10 * abs(fine):
        raise AccuracyError(
            f"K_{nu}({t}) trapezoid rule did not converge", achieved=err / abs(fine))
    return fine


def _kv_asymptotic(nu, t):
    # Hankel expansion, truncated at the smallest term; returns e^t K
    mu = 4.0 * nu * nu
    term = 1.0
    total = 1.0
    for k in range(1, 60):
        nxt = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * t)
        if abs(nxt) >= abs(term):
            break
        term = nxt
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return math.sqrt(math.pi / (2.0 * t)) * total


def _kv_scalar(nu, t, scaled):
    if not math.isfinite(t) or t <= 0.0:
        raise DomainError(f"bessel_k needs t > 0, got {t}")
    if t >= _K_ASYMPTOTIC_FROM:
        val = _kv_asymptotic(nu, t)
    else:
        val = _kv_quadrature(nu, t)
    return val if scaled else val * math.exp(-t)


def bessel_k(nu, t, *, scaled=False, method="auto"):
    """Modified Bessel function of the second kind.

    Evaluates ``K_nu(t) = int_0^inf exp(-t cosh z) cosh(nu z) dz`` by the
    trapezoidal rule (spectrally accurate for this analytic, decaying
    integrand) for ``t < 30`` and by the Hankel expansion beyond.

    Parameters
    ----------
    nu : float
        Order. Any real order is accepted since ``K_{-nu} = K_nu``.
    t : float or array_like
        Positive argument.
    scaled : bool
        Return ``exp(t) K_nu(t)`` instead, which never under- or overflows.
    method : {"auto", "quadrature", "asymptotic"}
        Force one of the two evaluation routes (used for seam checks).

    Returns
    -------
    float or ndarray
    """
    nu = float(nu)
    if method not in ("auto", "quadrature", "asymptotic"):
        raise ValueError(f"unknown method {method!r}")

    def one(x):
        x = float(x)
        if method == "auto":
            return _kv_scalar(nu, x, scaled)
        if not math.isfinite(x) or x <= 0.0:
            raise DomainError(f"bessel_k needs t > 0, got {x}")
        val = _kv_quadrature(nu, x) if method == "quadrature" else _kv_asymptotic(nu, x)
        return val if scaled else val * math.exp(-x)

    if np.ndim(t) == 0:
        return one(t)
    arr = np.asarray(t, dtype=float)
    return np.array([one(x) for x in arr.ravel()]).reshape(arr.shape)


# ------------------------------------------------- Airy-type test function

_LAM_K13 = 1.0 / (math.pi * math.sqrt(3.0) * AI0)
_LAM_K23 = 1.0 / (math.pi * math.sqrt(3.0) * AI0)


def airy_lambda_scaled(t):
    """Return ``(lam(t) e^zeta, lam'(t) e^zeta)`` with ``zeta = (2/3) t**1.5``.

    The pair stays O(1) for all ``t`` and lets callers combine the
    exponential factor with others before exponentiating.
    """
    t = float(t)
    if t < 0.0 or not math.isfinite(t):
        raise DomainError(f"need finite t >= 0, got {t}")
    if t == 0.0:
        return 1.0, AIP0 / AI0
    zeta = float(char_radius(t))
    k13 = bessel_k(1.0 / 3.0, zeta, scaled=True)
    k23 = bessel_k(2.0 / 3.0, zeta, scaled=True)
    # Ai(t) = sqrt(t/3) K_{1/3}(zeta) / pi ; Ai'(t) = -t K_{2/3}(zeta) / (pi sqrt 3)
    return math.sqrt(t) * _LAM_K13 * k13, -t * _LAM_K23 * k23


def airy_lambda(t, *, with_flag=False):
    """Decaying solution of ``y'' = t y`` with ``y(0) = 1``.

    Equal to ``Ai(t) / Ai(0)`` and computed as a multiple of
    ``sqrt(t) K_{1/3}((2/3) t**1.5)``.

    Parameters
    ----------
    t : float or array_like
        Non-negative argument.
    with_flag : bool
        Also return a boolean (array) marking results that underflowed to 0.
    """
    def one(x):
        scaled, _ = airy_lambda_scaled(x)
        zeta = float(char_radius(x))
        val = scaled * math.exp(-zeta)
        return val, (val == 0.0 and scaled != 0.0)

    if np.ndim(t) == 0:
        val, flag = one(t)
    else:
        arr = np.asarray(t, dtype=float)
        pairs = [one(x) for x in arr.ravel()]
        val = np.array([p[0] for p in pairs]).reshape(arr.shape)
        flag = np.array([p[1] for p in pairs]).reshape(arr.shape)
    return (val, flag) if with_flag else val


def airy_lambda_prime(t):
    """Derivative of :func:`airy_lambda`."""
    def one(x):
        _, scaled = airy_lambda_scaled(x)
        return scaled * math.exp(-float(char_radius(x)))

    if np.ndim(t) == 0:
        return one(t)
    arr = np.asarray(t, dtype=float)
    return np.array([one(x) for x in arr.ravel()]).reshape(arr.shape)


# --------------------------------------------------------------- Airy pair

def airy_arrays(s):
    """Vectorised ``(Ai, Ai', Bi, Bi')`` at real arguments ``s``."""
    with np.errstate(over="ignore"):
        ai, aip, bi, bip = special.airy(np.asarray(s, dtype=float))
    return ai, aip, bi, bip


def airy_pair(s):
    """Airy functions at a real argument, with an overflow flag on Bi."""
    s = float(s)
    if not math.isfinite(s):
        raise DomainError(f"airy_pair needs a finite argument, got {s}")
    ai, aip, bi, bip = (float(v) for v in airy_arrays(s))
    saturated = not (math.isfinite(bi) and math.isfinite(bip))
    return AiryPairValue(ai, bi, aip, bip, s, saturated)


# ---------------------------------------------------------------- Kummer

def hyp0f1_neg(b, x, *, method="auto"):
    """``0F1(; b; -x**2/4)`` for real ``x >= 0``.

    Power series for ``x < 15`` and the Hankel expansion of
    ``Gamma(b) (x/2)**(1-b) J_{b-1}(x)`` beyond, truncated at its smallest
    term.
    """
    x = np.abs(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    if method == "auto":
        small = x < _SERIES_SEAM / 2.0
    elif method == "series":
        small = np.ones(x.shape, dtype=bool)
    elif method == "asymptotic":
        small = np.zeros(x.shape, dtype=bool)
    else:
        raise ValueError(f"unknown method {method!r}")

    xs = x[small]
    if xs.size:
        w = -0.25 * xs * xs
        term = np.ones_like(xs)
        total = np.ones_like(xs)
        for k in range(400):
            term = term * w / ((b + k) * (k + 1))
            total += term
            if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
                break
        else:
            raise AccuracyError("0F1 series did not converge",
                                achieved=float(np.max(np.abs(term))))
        out[small] = total

    xl = x[~small]
    if xl.size:
        if np.any(xl <= 0):
            raise DomainError("asymptotic branch needs x > 0")
        nu = b - 1.0
        mu = 4.0 * nu * nu
        p_sum = np.ones_like(xl)
        q_sum = np.zeros_like(xl)
        term = np.ones_like(xl)
        live = np.ones(xl.shape, dtype=bool)
        last = np.ones_like(xl)
        for k in range(1, 80):
            nxt = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * xl)
            live &= np.abs(nxt) < np.abs(last)
            if not live.any():
                break
            term = np.where(live, nxt, 0.0)
            last = np.where(live, np.abs(nxt), last)
            sign = (-1) ** ((k - 1) // 2) if k % 2 else (-1) ** (k // 2)
            if k % 2:
                q_sum += sign * term
            else:
                p_sum += sign * term
            if np.all(np.abs(term) < 1e-17):
                break
        omega = xl - 0.5 * math.pi * nu - 0.25 * math.pi
        bessel_j = np.sqrt(2.0 / (math.pi * xl)) * (
            p_sum * np.cos(omega) - q_sum * np.sin(omega))
        out[~small] = math.gamma(b) * (0.5 * xl) ** (1.0 - b) * bessel_j
    return out


def _check_kummer_args(a, c, z):
    if not any(abs(a - pa) < 1e-12 and abs(c - pc) < 1e-12 for pa, pc in _KUMMER_PAIRS):
        raise DomainError(f"(a, c) = ({a}, {c}) is not a supported parameter pair")
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z.real) > 1e-14 * np.maximum(np.abs(z), 1.0)):
        raise DomainError("kummer_phi is only defined on the imaginary axis")
    return z


def kummer_phi(a, c, z, derivative=0):
    """Kummer's function ``1F1(a; c; z)`` for ``z`` on the imaginary axis.

    Both supported pairs have ``c = 2a``, for which
    ``exp(-z/2) 1F1(a; 2a; z) = 0F1(; a + 1/2; z**2/16)``. On ``z = iy``
    the right side is ``0F1(; b; -(y/2)**2/4)``, a real Bessel-type function.

    Parameters
    ----------
    a, c : float
        Either ``(1/6, 1/3)`` or ``(5/6, 5/3)``.
    z : complex or array_like
        Purely imaginary argument(s).
    derivative : {0, 1, 2}
        Order of the z-derivative to return.
    """
    z = _check_kummer_args(float(a), float(c), z)
    b = float(a) + 0.5
    x = 0.5 * np.abs(z.imag)
    w = z * z / 16.0
    f0 = hyp0f1_neg(b, x)
    ez = np.exp(0.5 * z)
    if derivative == 0:
        out = ez * f0
    else:
        # d/dz 0F1(;b;w) = 0F1(;b+1;w) z / (8 b)
        f1 = hyp0f1_neg(b + 1.0, x) / b
        g1 = f1 * z / 8.0
        if derivative == 1:
            out = ez * (0.5 * f0 + g1)
        elif derivative == 2:
            f2 = hyp0f1_neg(b + 2.0, x) / (b * (b + 1.0))
            g2 = f2 * (z / 8.0) ** 2 + f1 / 8.0
            out = ez * (0.25 * f0 + g1 + g2)
        else:
            raise ValueError("derivative must be 0, 1 or 2")
    return out[()] if out.ndim == 0 else out


# -------------------------------------------------------- Gauss 2F1(g,g;1;z)

def gauss_hyp_unit_at_one(gamma):
    """Limit of ``2F1(g, g; 1; z)`` as ``z -> 1``, by Gauss's summation."""
    return math.gamma(1.0 - 2.0 * gamma) / math.gamma(1.0 - gamma) ** 2


def _hyp_series(a, b, c, z, tol=1e-17):
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(2000):
        term = term * (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
        if np.all(np.abs(term) <= tol * np.abs(total)):
            return total
    raise AccuracyError("2F1 series did not converge",
                        achieved=float(np.max(np.abs(term / total))))


def _hyp_gg1(gamma, z):
    # z in [0, 1]; connection to 1 - z for z > 1/2
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    low = z <= 0.5
    if np.any(low):
        out[low] = _hyp_series(gamma, gamma, 1.0, z[low])
    if np.any(~low):
        w = 1.0 - z[~low]
        coef_a = gauss_hyp_unit_at_one(gamma)
        coef_b = math.gamma(2.0 * gamma - 1.0) / math.gamma(gamma) ** 2
        first = _hyp_series(gamma, gamma, 2.0 * gamma, w)
        second = _hyp_series(1.0 - gamma, 1.0 - gamma, 2.0 - 2.0 * gamma, w)
        with np.errstate(divide="ignore", invalid="ignore"):
            tail = np.where(w > 0, coef_b * w ** (1.0 - 2.0 * gamma) * second, 0.0)
        out[~low] = coef_a * first + tail
    return out


def _check_gamma(gamma):
    if not 0.0 < gamma < 0.5:
        raise DomainError(f"gamma must lie in (0, 1/2), got {gamma}")


def gauss_hyp_unit(gamma, z):
    """``2F1(gamma, gamma; 1; z)`` for ``0 <= z < 1``.

    Equals the Euler integral
    ``int_0^1 s**(gamma-1) (1-s)**(-gamma) (1-zs)**(-gamma) ds``
    divided by ``Gamma(gamma) Gamma(1-gamma)``. Taylor series up to
    ``z = 1/2``, the ``1 - z`` connection formula above.
    """
    _check_gamma(gamma)
    arr = np.asarray(z, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr >= 1.0):
        raise DomainError("gauss_hyp_unit needs 0 <= z < 1")
    out = _hyp_gg1(gamma, np.atleast_1d(arr)).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def gauss_hyp_unit_euler(gamma, z, *, epsabs=1e-14, epsrel=1e-13):
    """Quadrature route for :func:`gauss_hyp_unit` (used as an oracle).

    Substitutions ``s = u**(1/gamma)`` on ``[0, 1/2]`` and
    ``1 - s = v**(1/(1-gamma))`` on ``[1/2, 1]`` remove both endpoint
    singularities of the Euler integrand.
    """
    _check_gamma(gamma)
    z = float(z)
    if not 0.0 <= z < 1.0:
        raise DomainError("gauss_hyp_unit_euler needs 0 <= z < 1")
    g = gamma

    def left(u):
        s = u ** (1.0 / g)
        return (1.0 - s) ** (-g) * (1.0 - z * s) ** (-g) / g

    def right(v):
        s = 1.0 - v ** (1.0 / (1.0 - g))
        return s ** (g - 1.0) * (1.0 - z * s) ** (-g) / (1.0 - g)

    u_end = 0.5 ** g
    v_end = 0.5 ** (1.0 - g)
    # near z = 1 the right integrand has a v**(-g/(1-g)) layer of width ~ (1-z)
    knee = min(v_end, (1.0 - z) ** (1.0 - g) if z > 0 else v_end)
    pts = [knee] if 0 < knee < v_end else None
    i1, e1 = integrate.quad(left, 0.0, u_end, epsabs=epsabs, epsrel=epsrel, limit=200)
    i2, e2 = integrate.quad(right, 0.0, v_end, epsabs=epsabs, epsrel=epsrel,
                            limit=200, points=pts)
    norm = math.gamma(g) * math.gamma(1.0 - g)
    if e1 + e2 > 1e-9 * abs(i1 + i2):
        raise AccuracyError("Euler integral quadrature did not converge",
                            achieved=(e1 + e2) / abs(i1 + i2))
    return (i1 + i2) / norm
