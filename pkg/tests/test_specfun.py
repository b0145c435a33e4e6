import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from tricomilab import specfun as sf
from tricomilab.errors import DomainError

mp.mp.dps = 30


def _k_oracle(nu, t):
    return float(mp.besselk(nu, t))


def _k_defining_integral(nu, t):
    # tail bound: e^{-t cosh Z} < 1e-18
    Z = math.acosh(1.0 + 45.0 / t) + 1.0
    val, _ = integrate.quad(lambda z: math.exp(-t * math.cosh(z)) * math.cosh(nu * z),
                            0.0, Z, epsabs=0, epsrel=1e-13, limit=200)
    return val


class TestBesselK:
    def test_half_order_closed_form(self):
        assert sf.bessel_k(0.5, 1.0) == pytest.approx(math.sqrt(math.pi / 2) / math.e, rel=1e-12)

    @pytest.mark.parametrize("nu", [1 / 3, 2 / 3, 0.5, 0.9])
    @pytest.mark.parametrize("t", [0.05, 0.5, 1.0, 5.0, 20.0, 29.9, 30.0, 45.0, 200.0])
    def test_against_mpmath(self, nu, t):
        assert sf.bessel_k(nu, t) == pytest.approx(_k_oracle(nu, t), rel=1e-10)

    def test_quadrature_oracle_third_order(self):
        v = sf.bessel_k(1 / 3, 1.0)
        assert abs(v - _k_defining_integral(1 / 3, 1.0)) / v < 1e-10

    def test_large_argument_ratio(self):
        ratio = sf.bessel_k(1 / 3, 50.0) * math.sqrt(2 * 50.0 / math.pi) * math.exp(50.0)
        assert 0.9 <= ratio <= 1.1

    @pytest.mark.parametrize("nu", [1 / 3, 2 / 3])
    @pytest.mark.parametrize("t", [25.0, 30.0, 40.0])
    def test_routes_agree_at_seam(self, nu, t):
        a = sf.bessel_k(nu, t, scaled=True, method="quadrature")
        b = sf.bessel_k(nu, t, scaled=True, method="asymptotic")
        assert a == pytest.approx(b, rel=1e-11)

    def test_scaled_survives_underflow(self):
        assert sf.bessel_k(1 / 3, 1000.0) == 0.0
        s = sf.bessel_k(1 / 3, 1000.0, scaled=True)
        assert s == pytest.approx(math.sqrt(math.pi / 2000.0), rel=1e-3)

    @pytest.mark.parametrize("t", [0.5, 1.0, 5.0, 20.0])
    def test_recurrence(self, t):
        nu = 1 / 3
        lhs = sf.bessel_k(nu + 1, t) - sf.bessel_k(nu - 1, t)
        rhs = 2 * nu / t * sf.bessel_k(nu, t)
        assert lhs == pytest.approx(rhs, rel=1e-8)

    @pytest.mark.parametrize("t", [0.0, -1.0, float("nan")])
    def test_domain(self, t):
        with pytest.raises(DomainError):
            sf.bessel_k(1 / 3, t)

    def test_array_input(self):
        t = np.array([[0.5, 1.0], [2.0, 40.0]])
        out = sf.bessel_k(2 / 3, t)
        assert out.shape == t.shape
        assert np.allclose(out, special.kv(2 / 3, t), rtol=1e-10)


class TestAiryLambda:
    def test_origin_exact(self):
        assert sf.airy_lambda(0.0) == 1.0

    @pytest.mark.parametrize("t", [0.01, 0.3, 1.0, 3.0, 10.0, 25.0])
    def test_against_ai_ratio(self, t):
        ref = float(mp.airyai(t) / mp.airyai(0))
        assert sf.airy_lambda(t) == pytest.approx(ref, rel=1e-10)

    def test_ode_oracle_t10(self):
        # lam = Ai/Ai(0) solves lam'' = t lam with lam(0) = 1, lam'(0) = Ai'(0)/Ai(0)
        lp0 = float(mp.airyai(0, derivative=1) / mp.airyai(0))
        sol = mp.odefun(lambda t, y: [y[1], t * y[0]], 0, [mp.mpf(1), mp.mpf(lp0)])
        # forward integration of the decaying branch loses digits; stop at 4 and bridge
        ref = float(mp.airyai(10) / mp.airyai(0))
        assert float(sol(4)[0]) == pytest.approx(sf.airy_lambda(4.0), rel=1e-8)
        assert sf.airy_lambda(10.0) == pytest.approx(ref, rel=1e-8)

    def test_derivative(self):
        for t in (0.0, 0.5, 2.0, 8.0):
            ref = float(mp.airyai(t, derivative=1) / mp.airyai(0))
            assert sf.airy_lambda_prime(t) == pytest.approx(ref, rel=1e-10)

    def test_ode_residual(self):
        h = 1e-4
        t = np.linspace(0.1, 10.0, 200)
        lam = sf.airy_lambda(t)
        d2 = (sf.airy_lambda(t + h) - 2 * lam + sf.airy_lambda(t - h)) / h ** 2
        assert np.max(np.abs(d2 - t * lam) / (1 + np.abs(lam))) < 1e-6

    def test_monotone_decay(self):
        lam = sf.airy_lambda(np.linspace(0.0, 30.0, 400))
        assert np.all(np.diff(lam) < 0)
        assert lam[-1] > 0

    def test_asymptotic_envelope(self):
        for t in (5.0, 20.0, 100.0):
            scaled, _ = sf.airy_lambda_scaled(t)
            # lam t^{1/4} e^{phi} -> 1 / (2 sqrt(pi) Ai(0))
            limit = 1.0 / (2 * math.sqrt(math.pi) * sf.AI0)
            assert scaled * t ** 0.25 == pytest.approx(limit, rel=0.02)

    def test_underflow_flag(self):
        val, flag = sf.airy_lambda(2000.0, with_flag=True)
        assert val == 0.0 and flag
        val, flag = sf.airy_lambda(np.array([1.0, 2000.0]), with_flag=True)
        assert list(flag) == [False, True]

    def test_domain(self):
        with pytest.raises(DomainError):
            sf.airy_lambda(-0.1)


class TestAiryPair:
    def test_origin(self):
        v = sf.airy_pair(0.0)
        assert v.ai == pytest.approx(3 ** (-2 / 3) / math.gamma(2 / 3), rel=1e-14)
        assert v.bi == pytest.approx(3 ** (-1 / 6) / math.gamma(2 / 3), rel=1e-14)

    def test_origin_quadrature_oracle(self):
        ref = float(mp.quadosc(lambda z: mp.cos(z ** 3 / 3), [0, mp.inf],
                               zeros=lambda n: mp.cbrt(3 * mp.pi * (n - 0.5)))) / math.pi
        assert sf.airy_pair(0.0).ai == pytest.approx(ref, rel=1e-10)

    @pytest.mark.parametrize("s", [-10.0, 0.0, 3.0])
    def test_wronskian_points(self, s):
        assert abs(sf.airy_pair(s).wronskian - 1 / math.pi) < 1e-10

    def test_wronskian_random(self, rng):
        for s in rng.uniform(-20.0, 5.0, 100):
            w = sf.airy_pair(s).wronskian
            assert abs(w - 1 / math.pi) < 1e-10 * (1 / math.pi)

    def test_oscillatory_side(self):
        v = sf.airy_pair(-5.0)
        assert abs(v.ai) <= 1 and abs(v.bi) <= 1
        env = math.hypot(v.ai, v.bi)
        assert env == pytest.approx(5.0 ** -0.25 / math.sqrt(math.pi), rel=0.05)

    def test_saturation(self):
        assert sf.airy_pair(200.0).saturated
        assert not sf.airy_pair(10.0).saturated


def _kummer_series(a, c, z, terms=400):
    return complex(mp.hyp1f1(a, c, z))


class TestKummer:
    @pytest.mark.parametrize("a,c", [(1 / 6, 1 / 3), (5 / 6, 5 / 3)])
    def test_origin(self, a, c):
        assert sf.kummer_phi(a, c, 0j) == 1

    def test_series_oracle(self):
        got = sf.kummer_phi(1 / 6, 1 / 3, 2j)
        assert abs(got - _kummer_series(1 / 6, 1 / 3, 2j)) < 1e-10

    @pytest.mark.parametrize("a,c", [(1 / 6, 1 / 3), (5 / 6, 5 / 3)])
    @pytest.mark.parametrize("y", [-45.0, -7.0, 0.3, 12.0, 29.0, 31.0, 50.0])
    def test_against_mpmath(self, a, c, y):
        ref = _kummer_series(a, c, 1j * y)
        assert abs(sf.kummer_phi(a, c, 1j * y) - ref) <= 1e-10 * max(1.0, abs(ref))

    @pytest.mark.parametrize("a,c", [(1 / 6, 1 / 3), (5 / 6, 5 / 3)])
    def test_ode_residual(self, a, c):
        z = 1j * np.linspace(-50.0, 50.0, 301)
        f0 = sf.kummer_phi(a, c, z)
        f1 = sf.kummer_phi(a, c, z, derivative=1)
        f2 = sf.kummer_phi(a, c, z, derivative=2)
        res = z * f2 + (c - z) * f1 - a * f0
        scale = np.abs(z * f2) + np.abs((c - z) * f1) + np.abs(a * f0)
        assert np.max(np.abs(res) / scale) < 1e-7

    def test_large_argument_decay(self):
        # oscillates with period 4 pi in y; compare envelopes over one period
        env = []
        for y0 in (100.0, 400.0, 1600.0):
            ys = y0 + np.linspace(0.0, 4 * np.pi, 400)
            vals = np.abs(np.exp(-0.5 * 1j * ys) * sf.kummer_phi(1 / 6, 1 / 3, 1j * ys))
            env.append(np.max(vals) * y0 ** (1 / 6))
        assert np.ptp(env) / np.mean(env) < 0.05

    def test_hyp0f1_seam(self):
        for b in (2 / 3, 4 / 3, 5 / 3, 7 / 3):
            for x in (14.0, 15.0, 18.0):
                a = sf.hyp0f1_neg(b, np.array([x]), method="series")[0]
                c = sf.hyp0f1_neg(b, np.array([x]), method="asymptotic")[0]
                assert abs(a - c) < 1e-9

    def test_off_axis_rejected(self):
        with pytest.raises(DomainError):
            sf.kummer_phi(1 / 6, 1 / 3, 1.0 + 1j)

    def test_unsupported_pair(self):
        with pytest.raises(DomainError):
            sf.kummer_phi(0.5, 1.0, 1j)


class TestGaussHyp:
    G = 1 / 6

    def test_origin(self):
        assert sf.gauss_hyp_unit(self.G, 0.0) == 1.0

    def test_euler_oracle(self):
        assert abs(sf.gauss_hyp_unit(self.G, 0.5) - sf.gauss_hyp_unit_euler(self.G, 0.5)) < 1e-9

    @pytest.mark.parametrize("z", [0.1, 0.5, 0.51, 0.9, 0.999, 0.999999])
    def test_against_mpmath(self, z):
        ref = float(mp.hyp2f1(self.G, self.G, 1, z))
        assert sf.gauss_hyp_unit(self.G, z) == pytest.approx(ref, rel=1e-12)

    def test_bound(self):
        z = np.linspace(0.0, 0.999, 500)
        bound = special.beta(self.G, 1 - 2 * self.G) / (math.gamma(self.G) * math.gamma(1 - self.G))
        assert np.all(sf.gauss_hyp_unit(self.G, z) <= bound + 1e-9)
        assert bound == pytest.approx(sf.gauss_hyp_unit_at_one(self.G), rel=1e-14)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(0.01, 0.49), st.floats(0.0, 0.998), st.floats(1e-4, 1e-3))
    def test_monotone(self, g, z, dz):
        assert sf.gauss_hyp_unit(g, z + dz) >= sf.gauss_hyp_unit(g, z)

    @settings(max_examples=25, deadline=None)
    @given(st.floats(0.05, 0.45), st.floats(0.0, 0.99))
    def test_series_matches_quadrature(self, g, z):
        assert sf.gauss_hyp_unit(g, z) == pytest.approx(sf.gauss_hyp_unit_euler(g, z), rel=1e-9)

    @pytest.mark.parametrize("z", [1.0, -0.1, 1.5])
    def test_domain(self, z):
        with pytest.raises(DomainError):
            sf.gauss_hyp_unit(self.G, z)


@settings(max_examples=50, deadline=None)
@given(st.floats(-20.0, 5.0))
def test_wronskian_property(s):
    assert abs(sf.airy_pair(s).wronskian - 1 / math.pi) < 1e-10


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(0.05, 60.0))
def test_bessel_k_property(nu, t):
    assert sf.bessel_k(nu, t) == pytest.approx(float(special.kv(nu, t)), rel=1e-9)


def test_char_radius():
    assert sf.char_radius(0.0) == 0.0
    assert sf.char_radius(9.0) == pytest.approx(18.0)


def test_eval_domain():
    d = sf.EvalDomain(0.0, 2.0)
    assert d.grid(5)[-1] == 2.0
    with pytest.raises(DomainError):
        sf.EvalDomain(2.0, 1.0)
    with pytest.raises(DomainError):
        sf.EvalDomain(0.0, 1.0, abs_tol=0.0)
