import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hamgrad.auxfn import (CSV_COLUMNS, AuxParams, F_pair, asymptotic_claims, comparability_scan, g_eval,
                           g_parts, h_quadrature, scan_rows_csv)
from hamgrad.errors import DomainError

mpmath = pytest.importorskip("mpmath")
mp = mpmath.mp


def mp_g(s, R, K):
    """Independent high-precision g = s log(e + 1/s)/R + K s sqrt(log(e + 1/s)/(s + 1))."""
    ell = mp.log(mp.e + 1 / s)
    return s * ell / R + K * s * mp.sqrt(ell) / mp.sqrt(s + 1)


class TestValues:
    def test_anchor_values(self):
        g1, dg1, _, g2, _, _ = g_parts(1.0)
        assert g1 == pytest.approx(math.log(math.e + 1), rel=1e-15)
        assert g1 == pytest.approx(1.313262, abs=1e-6)
        assert g2 == pytest.approx(math.sqrt(math.log(math.e + 1)) / math.sqrt(2), rel=1e-15)
        assert g2 == pytest.approx(0.810328, abs=1e-6)
        assert dg1 == pytest.approx(math.log(math.e + 1) - 1 / (math.e + 1), rel=1e-15)
        assert dg1 == pytest.approx(1.044321, abs=1e-6)

    def test_first_derivative_difference_quotient(self):
        h = 1e-6
        fd = ((1 + h) * math.log(math.e + 1 / (1 + h)) - (1 - h) * math.log(math.e + 1 / (1 - h))) / (2 * h)
        assert g_parts(1.0)[1] == pytest.approx(fd, rel=1e-8)

    @pytest.mark.parametrize("R,tau,k", [(1.0, 1.0, 0.0), (0.1, 0.01, 10.0), (10.0, 100.0, 1.0)])
    def test_derivatives_against_high_precision(self, R, tau, k):
        p = AuxParams(R, tau, k)
        s = np.geomspace(1e-4, 1e4, 41)
        v = g_eval(s, p)
        with mp.workdps(40):
            for i, si in enumerate(s):
                x = mp.mpf(si)
                f = lambda y: mp_g(y, mp.mpf(R), mp.mpf(p.K))
                assert float(v.g[i]) == pytest.approx(float(f(x)), rel=1e-13)
                assert float(v.dg[i]) == pytest.approx(float(mp.diff(f, x)), rel=1e-12)
                assert float(v.d2g[i]) == pytest.approx(float(mp.diff(f, x, 2)), rel=1e-9)

    def test_second_derivative_small_s(self):
        # the closed form must stay accurate where difference quotients degrade
        s = np.array([1e-8, 1e-6])
        _, _, d2g1, _, _, d2g2 = g_parts(s)
        with mp.workdps(50):
            for i, si in enumerate(s):
                x = mp.mpf(si)
                g1 = lambda y: y * mp.log(mp.e + 1 / y)
                g2 = lambda y: y * mp.sqrt(mp.log(mp.e + 1 / y)) / mp.sqrt(y + 1)
                assert d2g1[i] == pytest.approx(float(mp.diff(g1, x, 2)), rel=1e-10)
                assert d2g2[i] == pytest.approx(float(mp.diff(g2, x, 2)), rel=1e-10)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(1e-10, 1e10))
    def test_positive(self, s):
        g1, _, _, g2, _, _ = g_parts(s)
        assert g1 > 0 and g2 > 0
        assert g_eval(s, AuxParams(1.0, 1.0)).g > 0

    def test_domain(self):
        with pytest.raises(DomainError):
            g_parts(0.0)
        with pytest.raises(DomainError):
            AuxParams(0.0, 1.0)
        with pytest.raises(DomainError):
            AuxParams(1.0, 1.0, -1.0)


class TestFPair:
    def test_positive_at_anchor(self):
        F1, F2 = F_pair(1.0, AuxParams(1.0, 1.0, 0.0))
        assert F1 > 0 and F2 > 0

    def test_against_difference_oracle(self):
        p = AuxParams(1.0, 1.0, 0.0)
        with mp.workdps(40):
            f = lambda y: mp_g(y, 1, p.K)
            x = mp.mpf(1)
            g, dg, d2g = f(x), mp.diff(f, x), mp.diff(f, x, 2)
            F1 = float(g * (dg - d2g))
            F2 = float(abs(g - dg) + p.B)
        got = F_pair(1.0, p)
        assert got[0] == pytest.approx(F1, rel=1e-12)
        assert got[1] == pytest.approx(F2, rel=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(1e-8, 1e8), st.floats(0.01, 100), st.floats(0.01, 100), st.floats(0, 10))
    def test_second_at_least_B(self, s, R, tau, k):
        p = AuxParams(R, tau, k)
        F1, F2 = F_pair(s, p)
        assert F2 >= p.B
        assert F1 > 0

    def test_linear_growth(self):
        # R = 1, K = 1: F1/s and F2/s settle to constants
        p = AuxParams(1.0, 1.0, 0.0)
        s = np.array([1e6, 1e8, 1e10])
        F1, F2 = F_pair(s, p)
        r1, r2 = F1 / s, F2 / s
        assert r1[-1] == pytest.approx(1.0, rel=1e-3)
        assert r2[-1] == pytest.approx(1.0, rel=1e-3)
        assert abs(r1[1] - r1[2]) < abs(r1[0] - r1[1])


class TestScan:
    def test_single_point(self):
        res = comparability_scan([1.0], [1.0], [1.0], [0.0])
        assert res.ratio_min == res.ratio_max
        assert res.spread == 1.0

    def test_matches_pointwise(self):
        s = np.geomspace(1e-3, 1e3, 7)
        res = comparability_scan(s, [2.0], [0.5], [1.0], keep_rows=True)
        F1, F2 = F_pair(s, AuxParams(2.0, 0.5, 1.0))
        np.testing.assert_allclose(res.rows[:, 6], F1 / F2, rtol=1e-14)
        assert res.ratio_max == pytest.approx(max(F1 / F2), rel=1e-14)

    def test_grid_validation(self):
        with pytest.raises(DomainError):
            comparability_scan([], [1.0], [1.0], [0.0])
        with pytest.raises(DomainError):
            comparability_scan([1e-9], [1.0], [1.0], [0.0])

    def test_csv(self):
        res = comparability_scan([1.0, 2.0], [1.0], [1.0], [0.0], keep_rows=True)
        lines = scan_rows_csv(res).splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS) == "s,R,tau,k,F1,F2,ratio"
        assert len(lines) == 3

    def test_asymptotic_claims_bounded(self):
        claims = asymptotic_claims(np.geomspace(1e-6, 1e6, 400))
        assert set(claims) == {"g1'", "g1''", "g2'", "g2''"}
        for lo, hi in claims.values():
            assert 0 < lo <= hi < math.inf
            assert hi / lo < 20


class TestQuadrature:
    def test_empty_interval(self):
        assert h_quadrature(1.0, 1.0, AuxParams(1.0, 1.0), tails=False).value == 0.0

    def test_matches_high_precision(self):
        p = AuxParams(1.0, 1.0)
        got = h_quadrature(10.0, 0.1, p, tails=False)
        with mp.workdps(30):
            want = mp.quad(lambda y: 1 / mp_g(y, 1, p.K), [0.1, 1, 10])
        assert got.converged
        assert got.value == pytest.approx(float(want), rel=1e-9)

    @pytest.mark.parametrize("R", [0.5, 1.0, 2.0])
    def test_upper_tail_diverges_like_log(self, R):
        res = h_quadrature(2.0, 1.0, AuxParams(R, 1.0))
        up = res.upper_tail
        assert up.divergent and up.model == "log"
        assert up.last_slope == pytest.approx(R, rel=0.05)
        assert np.all(np.diff(up.values) > 0)

    def test_lower_tail_reported(self):
        res = h_quadrature(2.0, 1.0, AuxParams(1.0, 1.0))
        low = res.lower_tail
        assert np.all(np.diff(low.values) > 0)
        assert low.model in {"log", "sqrt-log", "loglog", "convergent"}
        assert set(low.residuals) == {"log", "sqrt-log", "loglog", "convergent"}
        assert low.as_dict()["endpoints"][-1] == 1e-12

    def test_domain(self):
        with pytest.raises(DomainError):
            h_quadrature(1.0, 2.0, AuxParams(1.0, 1.0))
