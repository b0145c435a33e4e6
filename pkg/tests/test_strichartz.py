from fractions import Fraction
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy import integrate

from tricomilab import strichartz as sz
from tricomilab.corpus import CORPUS_VERSION, Profile, glassey_corpus, source_corpus
from tricomilab.duhamel import SourceTerm
from tricomilab.errors import (
    ConeOverflowError,
    ConeViolationError,
    DomainError,
    InputError,
    NoAdmissiblePairError,
)
from tricomilab.fields import FieldState, Grid1D, InitialData
from tricomilab.propagator import LinearPropagator
from tricomilab.weights import WeightSpec

P1 = (3 + math.sqrt(33)) / 2


class TestExponents:
    def test_critical_exponents_default(self):
        rep = sz.critical_exponents(1, 1)
        assert rep.p_crit == 5 and rep.p_conf == 9 and rep.p0 == 9
        assert abs(rep.w1_root - P1) < 1e-12
        assert rep.p1 == pytest.approx(P1, abs=1e-15)
        assert rep.w1_residual < 1e-12
        assert rep.gamma_interval == (0.0, 1 / 12)

    def test_gamma_admissible_exact(self):
        gi = sz.gamma_admissible(9)
        assert gi == (Fraction(0), Fraction(1, 12))
        assert isinstance(gi.upper, Fraction)
        assert sz.gamma_admissible(Fraction(7)) == (0, Fraction(1, 16))

    @pytest.mark.parametrize("p", [1.5, 3, 4])
    def test_gamma_empty_at_or_below_four(self, p):
        assert sz.gamma_admissible(p).empty

    def test_gamma_float_path(self):
        gi = sz.gamma_admissible(9.0)
        assert gi.upper == pytest.approx(1 / 12, abs=1e-16)
        with pytest.raises(InputError):
            sz.gamma_admissible(1)

    def test_critical_gate(self):
        assert not sz.above_critical(5)
        assert not sz.above_critical(Fraction(9, 2))
        assert sz.above_critical(Fraction(501, 100))

    def test_picard_window_p7(self):
        assert sz.picard_gamma_window(7) == (Fraction(1, 144), Fraction(1, 56))
        assert sz.picard_gamma_window(7).midpoint == Fraction(25, 2016)

    def test_picard_window_empty_for_small_p(self):
        assert sz.picard_gamma_window(4).empty

    def test_w1_coefficients_default(self):
        assert sz.w1_coefficients(1, 1) == (Fraction(1, 2), Fraction(-3, 2), -3)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 12), st.integers(1, 6))
    def test_w1_residual_property(self, m, n):
        rep = sz.critical_exponents(m, n)
        a, b, c = (float(v) for v in sz.w1_coefficients(m, n))
        if a <= 0:
            assert rep.degenerate and math.isnan(rep.w1_root)
        else:
            root = rep.w1_root
            scale = abs(a) * root * root + abs(b) * root + abs(c)
            assert abs((a * root + b) * root + c) <= 1e-14 * scale
            assert root > 0

    def test_report_json(self, tmp_path):
        text = sz.critical_exponents().to_json(tmp_path / "e.json", provenance={"k": 1})
        assert (tmp_path / "e.json").read_text() == text
        assert '"p_crit": 5.0' in text

    def test_bad_dimension(self):
        with pytest.raises(InputError):
            sz.critical_exponents(0, 1)


class TestAlphaBeta:
    def test_boundary_q10(self):
        ab = sz.alphabeta_solve(10)
        assert ab.boundary and ab.alpha == 0 and ab.beta == 0
        fab = sz.alphabeta_solve(10.0)
        assert fab.boundary and math.copysign(1.0, fab.alpha) == 1.0

    def test_p7_exact(self):
        ab = sz.alphabeta_solve(8)
        assert ab.alpha == Fraction(-1, 144) and ab.beta == Fraction(7, 144)

    @pytest.mark.parametrize("q", [11, 4, Fraction(5), P1 + 1])
    def test_outside_range(self, q):
        with pytest.raises(NoAdmissiblePairError):
            sz.alphabeta_solve(q)

    @settings(max_examples=100, deadline=None)
    @given(st.fractions(Fraction(P1 + 1 + 1e-9), Fraction(10)))
    def test_identity_exact(self, q):
        assume(q - 1 > P1)
        ab = sz.alphabeta_solve(q)
        assert ab.alpha + Fraction(1, 6) + ab.beta == Fraction(5, 3) / q
        assert ab.beta == -(q - 1) * ab.alpha or ab.boundary
        assert ab.beta < 1 / q

    @settings(max_examples=100, deadline=None)
    @given(st.floats(P1 + 1 + 1e-6, 10.0))
    def test_identity_float(self, q):
        ab = sz.alphabeta_solve(q)
        assert abs(ab.alpha + 1 / 6 + ab.beta - 5 / (3 * q)) < 1e-12


class TestGlasseyConditions:
    @settings(max_examples=80, deadline=None)
    @given(st.fractions(Fraction(P1 + 1e-9), Fraction(9)))
    def test_satisfiable_exactly(self, p):
        assume(P1 < p < 9)
        cond = sz.glassey_conditions(*sz.glassey_exponents(p))
        assert cond.ok, cond.failed
        assert all(isinstance(v, Fraction) for v in (cond.alpha, cond.beta, cond.delta))

    @pytest.mark.parametrize("p", [Fraction(4), Fraction(43, 10)])
    def test_fails_below_p1(self, p):
        cond = sz.glassey_conditions(*sz.glassey_exponents(p))
        assert cond.failed == ["alpha+delta>1/q"]

    def test_fails_above_nine(self):
        cond = sz.glassey_conditions(*sz.glassey_exponents(10))
        assert cond.failed == ["alpha+beta>=0"]

    def test_scan_refuses_failed_conditions(self):
        scan = sz.glassey_ratio_scan(glassey_corpus(), *sz.glassey_exponents(Fraction(4)))
        assert scan.rows == [] and scan.violations == ["alpha+delta>1/q"]


def _glassey_oracle(g, a, b, alpha, beta, delta, u):
    # weight='alg' handles (xi - 0)^-beta (u - xi)^-delta exactly
    hi = min(b, u)
    if hi <= a:
        return 0.0
    if a > 0 and hi < u:
        val, _ = integrate.quad(lambda s: g(s) * s ** (-beta) * (u - s) ** (-delta),
                                a, hi, epsabs=0, epsrel=1e-12, limit=400)
    elif a > 0:
        val, _ = integrate.quad(lambda s: g(s) * s ** (-beta), a, u, weight="alg",
                                wvar=(0.0, -delta), epsabs=0, epsrel=1e-12, limit=400)
    else:
        val, _ = integrate.quad(lambda s: g(s), 0.0, u, weight="alg", wvar=(-beta, -delta),
                                epsabs=0, epsrel=1e-12, limit=400)
    return u ** (-alpha) * val


class TestGlasseyApply:
    ALPHA, BETA, DELTA = -1 / 144, 7 / 144, 1 / 24 + 1 / 6

    @pytest.mark.parametrize("u", [1.1, 1.6, 2.0, 3.5, 10.0])
    def test_bump_against_quadpack(self, u):
        prof = glassey_corpus()[1]
        got = sz.glassey_apply(prof, self.ALPHA, self.BETA, self.DELTA, [u])[0]
        ref = _glassey_oracle(prof, 0.5, 1.5, self.ALPHA, self.BETA, self.DELTA, u)
        assert got == pytest.approx(ref, rel=1e-9)

    def test_from_origin_against_quadpack(self):
        prof = Profile("exp", lambda x: np.exp(-np.asarray(x)), (0.0, 50.0))
        for u in (0.3, 1.0, 4.0):
            got = sz.glassey_apply(prof, self.ALPHA, self.BETA, self.DELTA, [u])[0]
            ref = _glassey_oracle(lambda s: math.exp(-s), 0.0, 50.0,
                                  self.ALPHA, self.BETA, self.DELTA, u)
            assert got == pytest.approx(ref, rel=1e-10)

    def test_indicator_closed_form(self):
        # beta = 0: int_1^u (u - xi)^-delta = (u - 1)^(1-delta) / (1 - delta)
        prof = glassey_corpus()[0]
        d = 0.3
        u = np.array([1.2, 1.9])
        got = sz.glassey_apply(prof, 0.0, 0.0, d, u)
        assert np.allclose(got, (u - 1) ** (1 - d) / (1 - d), rtol=1e-12)

    def test_zero_left_of_support(self):
        prof = glassey_corpus()[2]
        assert not np.any(sz.glassey_apply(prof, 0.0, 0.1, 0.2, [0.5, 3.0]))

    def test_domain(self):
        prof = glassey_corpus()[0]
        with pytest.raises(DomainError):
            sz.glassey_apply(prof, 0.0, 0.0, 1.0, [1.5])
        with pytest.raises(InputError):
            sz.glassey_apply(prof, 0.0, 0.0, 0.5, [0.0])
        with pytest.raises(InputError):
            sz.glassey_apply(lambda x: x, 0.0, 0.0, 0.5, [1.0])


class TestGlasseyScan:
    def test_lq_norm_halfline_known(self):
        val = sz.lq_norm_halfline(lambda u: 1.0 / (1.0 + u), 2.0, [0.0, 1.0], tail_exponent=1.0)
        assert val == pytest.approx(1.0, rel=1e-12)

    def test_dilation_invariance_exact(self):
        a, b, d, q, r = sz.glassey_exponents(Fraction(7))
        prof = glassey_corpus()[3]
        base = sz.glassey_ratio(prof, a, b, d, q, r)
        for lam in (0.1, 7.0):
            nf, ng = sz.glassey_ratio(prof.dilate(lam), a, b, d, q, r)
            assert nf / ng == pytest.approx(base[0] / base[1], rel=1e-9)

    def test_scan_p7(self):
        scan = sz.glassey_ratio_scan(glassey_corpus(), *sz.glassey_exponents(Fraction(7)))
        assert scan.conditions.ok and len(scan.rows) == 15
        assert np.isfinite(scan.max_ratio) and scan.max_ratio > 0
        assert scan.dilation_spread < 1 + 1e-8
        text = scan.to_csv(header_comment="x")
        assert text.splitlines()[1] == "case_id,lhs,rhs,ratio"

    def test_corpus_versioned(self):
        assert CORPUS_VERSION == "2026.1"
        assert [p.name for p in glassey_corpus()] == [
            "indicator_1_2", "bump_1", "bump_4", "ramp_1_3", "hat_0p5_2"]
        assert [F.label for F in source_corpus()] == [f"src{k}" for k in range(5)]


@pytest.fixture(scope="module")
def linear_states():
    grid = Grid1D(20.0, 1024)
    prop = LinearPropagator(InitialData.bumps(grid, M=2.0, radius=1.5))
    return [prop(t) for t in np.linspace(0.0, 8.0, 81)]


class TestWeightedNorms:
    def test_gamma_zero_is_plain_norm(self, linear_states):
        w = WeightSpec(0.0, 3.0, 2.0)
        got = sz.weighted_norm(linear_states, w)
        dens = np.array([np.sum(np.abs(s.u) ** 3) * s.grid.dx for s in linear_states])
        t = np.array([s.t for s in linear_states])
        assert got == pytest.approx(integrate.trapezoid(dens, t) ** (1 / 3), rel=1e-13)

    def test_refinement(self, linear_states):
        w = WeightSpec(1 / 16, 8.0, 2.0)
        coarse = sz.weighted_norm(linear_states[::2], w)
        fine = sz.weighted_norm(linear_states, w)
        assert abs(coarse - fine) / fine < 0.02

    def test_t_range(self, linear_states):
        w = WeightSpec(0.0, 2.0, 2.0)
        assert sz.weighted_norm(linear_states, w, (9.0, 10.0)) == 0.0
        part = sz.weighted_norm(linear_states, w, (0.0, 4.0))
        assert 0 < part < sz.weighted_norm(linear_states, w)

    def test_cone_violation(self):
        grid = Grid1D(10.0, 128)
        s = [FieldState(t, np.ones(128), np.zeros(128), grid) for t in (0.0, 1.0)]
        with pytest.raises(ConeViolationError):
            sz.weighted_norm(s, WeightSpec(0.1, 2.0, 2.0))

    def test_snapshot_order(self, linear_states):
        with pytest.raises(InputError):
            sz.weighted_norm(linear_states[::-1], WeightSpec(0.0, 2.0, 2.0))
        with pytest.raises(InputError):
            sz.weighted_norm([], WeightSpec(0.0, 2.0, 2.0))

    def test_source_norm_against_dblquad(self):
        F = source_corpus()[1]
        w = WeightSpec(7 / 144, 8 / 7, 2.0, "zero")
        got = sz.source_weighted_norm(F, w)
        s_lo, s_hi, y_lo, y_hi = F.box

        def integrand(y, s):
            base = (2 / 3 * s ** 1.5) ** 2 - y * y
            return (base ** w.gamma * abs(float(F(s, y)))) ** w.q

        val, _ = integrate.dblquad(integrand, s_lo, s_hi, y_lo, y_hi, epsabs=0, epsrel=1e-10)
        assert got == pytest.approx(val ** (1 / w.q), rel=1e-8)


class TestInequalitySampler:
    W = (WeightSpec(1 / 144, 8.0, 2.0, "zero"), WeightSpec(7 / 144, 8 / 7, 2.0, "zero"))
    GRID = Grid1D(6.0, 256)

    def test_scale_invariance_and_skip(self):
        F = source_corpus()[0]
        zero = F.scaled(0.0)
        scan = sz.inhomogeneous_inequality_sample([F, 2.0 * F, zero], self.W, 3.0, self.GRID,
                                                  count=6, rtol=1e-6)
        assert scan.skipped == [zero.label or "case2"]
        r1, r2 = scan.ratios
        assert r2 == pytest.approx(r1, rel=1e-12)
        assert scan.max_ratio == pytest.approx(scan.min_ratio, rel=1e-12)

    def test_cone_overflow(self):
        with pytest.raises(ConeOverflowError):
            sz.inhomogeneous_inequality_sample(source_corpus()[:1], self.W, 8.0, self.GRID)

    def test_source_after_horizon(self):
        F = SourceTerm.bump_source(4.0, 0.2, 0.0, 0.3)
        with pytest.raises(InputError):
            sz.inhomogeneous_inequality_sample([F], self.W, 3.0, self.GRID)

    def test_pair_type(self):
        with pytest.raises(InputError):
            sz.inhomogeneous_inequality_sample(source_corpus(), (1, 2), 3.0, self.GRID)
