import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hamgrad.bounds import (INF, BoundEnv, BoundKind, FunctionalForm, H1, HamiltonQuery,
                            evaluate_bound, functional_profile, functional_profile_slope,
                            grad_functional, h0, h1_global, inv_sq, kernel_log_grad_bound,
                            legacy_bound, lower_envelope, modulus_psi, modulus_radius,
                            pseudo_harnack)
from hamgrad.errors import ConfigurationError, DomainError, SingularInputError

pos = st.floats(1e-3, 1e3)
svals = st.floats(0.0, 1e4)


class TestEnv:
    def test_valid(self):
        env = BoundEnv(3, 2.0, INF, 1.0)
        assert env.M is None and env.with_M(2.0).M == 2.0

    @pytest.mark.parametrize("kw", [dict(n=0), dict(n=1.5), dict(k=-1.0), dict(R=0.0),
                                    dict(T=0.0), dict(T=INF), dict(M=0.0)])
    def test_invalid(self, kw):
        base = dict(n=1, k=0.0, R=1.0, T=1.0, M=1.0)
        base.update(kw)
        with pytest.raises(DomainError):
            BoundEnv(**base)

    def test_query_validation(self):
        HamiltonQuery(0.0, 1.0)
        with pytest.raises(DomainError):
            HamiltonQuery(-1.0, 1.0)
        with pytest.raises(DomainError):
            HamiltonQuery(1.0, 0.0)

    def test_inverse_square_radius(self):
        assert inv_sq(INF) == 0.0
        assert inv_sq(2.0) == 0.25


class TestH0:
    def test_large_branch(self):
        assert h0(2.0, 1.0, 1.0, 0.0) == 6.0

    def test_zero(self):
        assert h0(0.0, 1.0, 1.0, 0.0) == 0.0

    def test_small_branch(self):
        assert h0(math.exp(-1), 1.0, 1.0, 0.0) == pytest.approx(2 * math.exp(-2), rel=1e-14)
        assert 2 * math.exp(-2) == pytest.approx(0.270671, abs=1e-6)

    def test_vectorized(self):
        out = h0(np.array([0.0, 2.0]), 1.0, 1.0)
        np.testing.assert_array_equal(out, [0.0, 6.0])

    @pytest.mark.parametrize("args", [(-1.0, 1.0, 1.0), (1.0, 0.0, 1.0), (1.0, 1.0, 0.0), (np.nan, 1.0, 1.0)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            h0(*args)

    def test_jump_at_half(self):
        lo = h0(0.5, 1.0, 1.0)
        hi = h0(np.nextafter(0.5, 1.0), 1.0, 1.0)
        assert hi != lo
        # certify the jump factor over a scan of t, R, k
        factors = []
        for t in np.geomspace(1e-3, 1e3, 13):
            for R in [*np.geomspace(1e-2, 1e2, 9), INF]:
                for k in (0.0, 1.0, 10.0):
                    a, b = h0(0.5, t, R, k), h0(np.nextafter(0.5, 1.0), t, R, k)
                    factors.append(max(a, b) / min(a, b))
        assert max(factors) <= 10.0

    @settings(max_examples=200, deadline=None)
    @given(svals, pos, pos, st.floats(0, 100), st.floats(0, 100), st.floats(1.0, 10.0))
    def test_monotone_in_k_and_inverse_t(self, s, t, R, k, dk, stretch):
        assert h0(s, t, R, k) <= h0(s, t, R, k + dk)
        assert h0(s, t * stretch, R, k) <= h0(s, t, R, k)

    @settings(max_examples=200, deadline=None)
    @given(svals, pos, pos, st.floats(0, 100))
    def test_infinite_radius_is_smallest(self, s, t, R, k):
        assert h0(s, t, INF, k) <= h0(s, t, R, k)

    @settings(max_examples=300, deadline=None)
    @given(st.floats(1e-300, 1e6), pos, st.floats(0, 100))
    def test_global_branch_equality(self, s, t, k):
        if s > 0.5:
            assert h0(s, t, INF, k) == (1 / t + k) * H1(s)
        else:
            assert h0(s, t, INF, k) == pytest.approx((1 / t + k) * s**2 * abs(math.log(s)), rel=1e-15, abs=0)

    def test_dominance_dense_scan(self):
        s = np.concatenate([[0.0], np.geomspace(1e-8, 1e6, 2001)])
        worst = 0.0
        for t in np.geomspace(1e-3, 1e3, 13):
            for R in [*np.geomspace(1e-2, 1e2, 9), INF]:
                for k in (0.0, 1.0, 10.0):
                    ratio = h0(s, t, R, k) / (2 * (inv_sq(R) + 1 / t + k) * (1 + s**2))
                    worst = max(worst, ratio.max())
        assert worst <= 1.0

    def test_lower_envelope_dense_scan(self):
        s = np.geomspace(1e-8, 1e6, 2001)
        for t in np.geomspace(1e-3, 1e3, 13):
            for R in [*np.geomspace(1e-2, 1e2, 9), INF]:
                assert np.all(lower_envelope(s, t, R) <= 4 * h0(s, t, R, 0.0))


class TestGlobal:
    def test_examples(self):
        assert h1_global(2.0, 1.0, 0.0) == 2.0
        assert h1_global(0.0, 1.0, 0.0) == 0.0
        # independent arithmetic: s^2 |log s| at s = 1/4 is log(4)/16
        assert H1(0.25) == pytest.approx(math.log(4.0) / 16.0, rel=1e-15)
        assert H1(0.25) == pytest.approx(0.086643, abs=1e-6)

    def test_curvature(self):
        assert h1_global(2.0, 1.0, 3.0) == 8.0


class TestLegacy:
    def test_examples(self):
        assert legacy_bound("cheng-yau", 0.3, 1.0, 1.0, 0.0) == 1.0
        assert legacy_bound("hamilton", 1.0, 1.0, INF, 0.0) == 1.0
        assert legacy_bound("sz2006", 0.0, 1.0, 1.0, 0.0) == 2.0

    def test_li_yau(self):
        assert legacy_bound("li-yau", 1.0, 2.0, 1.0, 1.0, alpha=2.0) == 2.5
        with pytest.raises(ConfigurationError):
            legacy_bound("li-yau", 1.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            legacy_bound("li-yau", 1.0, 1.0, 1.0, alpha=0.5)

    def test_dn(self):
        # ((1 + s_bar)/R^2 + 1/t + k) s
        assert legacy_bound("dn", 1.0, 1.0, 1.0, 0.0, s_bar=2.0) == 4.0
        with pytest.raises(ConfigurationError):
            legacy_bound("dn", 1.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            legacy_bound("dn", 3.0, 1.0, 1.0, s_bar=2.0)

    def test_not_classical(self):
        with pytest.raises(ConfigurationError):
            legacy_bound("h0", 1.0, 1.0)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            evaluate_bound("nope", 1.0, 1.0)


class TestDispatch:
    def test_each_kind(self):
        assert evaluate_bound("h0", 2.0, 1.0, 1.0) == 6.0
        assert evaluate_bound("h1", 2.0, 1.0) == 2.0
        assert evaluate_bound("lower", 1.0, 1.0, 1.0) == 1.5
        assert evaluate_bound("lower-global", 1.0, 1.0, 1.0) == 0.5
        assert evaluate_bound("kernel", 0.0, 1.0, d=2.0) == 5.0
        assert evaluate_bound(BoundKind.CHENG_YAU, 0.0, 1.0, 1.0) == 1.0
        with pytest.raises(ConfigurationError):
            evaluate_bound("kernel", 0.0, 1.0)


class TestLowerEnvelope:
    def test_examples(self):
        assert lower_envelope(1.0, 1.0, 1.0) == 1.5
        assert lower_envelope(1.0, 1.0, INF) == 0.5
        assert lower_envelope(0.0, 3.0, 2.0) == 0.0


class TestPseudoHarnack:
    def test_zero_distance(self):
        theta, L = pseudo_harnack(0.0, 2.0, 0.5, 1.0, 0.3)
        assert theta == 1.0
        assert L == pytest.approx(2 * math.exp(0.3 * 4 * 3.0), rel=1e-15)

    def test_examples(self):
        theta, L = pseudo_harnack(1.0, 1.0, 1.0, 0.0, 1.0)
        assert theta == 0.5
        assert L == pytest.approx(2 * math.e, rel=1e-15)
        assert L == pytest.approx(5.43656, abs=1e-5)
        theta, L = pseudo_harnack(1.0, 2.0, 4.0, 0.0, 1.0)
        assert theta == pytest.approx(2 / 3, rel=1e-15)
        assert L == pytest.approx(2 * math.e, rel=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            pseudo_harnack(2.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            pseudo_harnack(0.5, INF, 1.0)
        with pytest.raises(DomainError):
            pseudo_harnack(0.5, 1.0, 1.0, C=0.0)

    @settings(max_examples=200, deadline=None)
    @given(pos, pos, st.floats(0, 10), st.floats(1e-3, 10))
    def test_range_and_monotonicity(self, R, t, k, C):
        d = np.linspace(0, R, 65)
        theta, L = pseudo_harnack(d, R, t, k, C)
        assert np.all(theta <= 1.0) and np.all(theta >= 1 / (1 + C) * (1 - 1e-15))
        assert np.all(np.diff(theta) < 0)
        assert np.all(L == L[0]) and L[0] >= 2.0


class TestModulus:
    def test_zero_distance(self):
        for u in (0.1, 0.5, 0.9, 1.0):
            assert modulus_psi(0.0, u, 1.0, 1.0, 1.0) == 0.0

    def test_branch_one_example(self):
        assert modulus_psi(1.0, 0.25, 1.0, 1.0, 1.0, 0.0, 1.0) == pytest.approx(4 * math.e - 1, rel=1e-14)
        assert 4 * math.e - 1 == pytest.approx(9.8731, abs=1e-4)

    def test_branch_two_radius(self):
        # xi = log(M/u) = log 2 sits on the large-u side just above u = M/2
        u = 0.5 * (1 + 1e-12)
        r = modulus_radius(u, 1.0, 1.0, 1.0, 0.0, 1.0)
        assert r == pytest.approx(1 / (1 + abs(math.log(math.log(2)))), rel=1e-9)
        assert r == pytest.approx(0.7318, abs=1e-4)

    def test_half_takes_safe_side(self):
        r = modulus_radius(0.5, 1.0, 1.0, 1.0)
        assert r == pytest.approx(1 / (1 + math.log(2)), rel=1e-14)
        d = 0.3
        both = (modulus_psi(d, 0.5 * (1 - 1e-13), 1.0, 1.0, 1.0), modulus_psi(d, 0.5 * (1 + 1e-13), 1.0, 1.0, 1.0))
        assert modulus_psi(d, 0.5, 1.0, 1.0, 1.0) == pytest.approx(max(both), rel=1e-9)

    def test_radius_at_max(self):
        assert modulus_radius(1.0, 1.0, 1.0, 1.0) == 0.0

    def test_domain(self):
        with pytest.raises(DomainError):
            modulus_psi(0.1, 2.0, 1.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            modulus_psi(-0.1, 0.5, 1.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            modulus_radius(0.0, 1.0, 1.0, 1.0)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(1e-6, 1.0), pos, pos, st.floats(0, 10), st.floats(1e-2, 10))
    def test_nondecreasing_in_distance(self, frac, R, t, k, C):
        d = np.linspace(0, R, 129)
        psi = modulus_psi(d, frac, 1.0, R, t, k, C)
        assert psi[0] == 0.0
        assert np.all(psi[1:] >= psi[:-1])


class TestKernelBound:
    def test_examples(self):
        assert kernel_log_grad_bound(0.0, 1.0, 1.0) == 1.0
        assert kernel_log_grad_bound(2.0, 1.0, 1.0) == 5.0
        assert kernel_log_grad_bound(1.0, 0.25, 0.25) == 5.0

    def test_domain(self):
        with pytest.raises(DomainError):
            kernel_log_grad_bound(-1.0, 1.0)


class TestFunctional:
    def test_small_example(self):
        M = 1.0
        u = M / math.e
        assert grad_functional("small", u, u, M, 1.0, 1.0, 0.0) == pytest.approx(0.25, rel=1e-14)

    def test_zero_gradient(self):
        for form, u in (("small", 0.3), ("large", 0.7), ("global", 0.5)):
            assert grad_functional(form, u, 0.0, 1.0, 1.0, 1.0) == 0.0

    def test_global_against_difference_quotient(self):
        h = 1e-6
        fd = (functional_profile("global", 1 + h, 1.0) - functional_profile("global", 1 - h, 1.0)) / (2 * h)
        u = 1 / math.e
        got = grad_functional("global", u, u, 1.0, 1.0, 1.0, 0.0)
        assert got == pytest.approx(abs(fd), rel=1e-6)

    def test_branch_domains(self):
        with pytest.raises(DomainError):
            grad_functional("small", 0.9, 1.0, 1.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            grad_functional("large", 0.1, 1.0, 1.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            grad_functional("global", 0.5, 1.0, 1.0, INF, 1.0)

    def test_singular(self):
        with pytest.raises(SingularInputError):
            grad_functional("global", 1.0, 0.0, 1.0, 1.0, 1.0)
        with pytest.raises(SingularInputError):
            functional_profile_slope("large", 1.0, 1.0)

    @settings(max_examples=200, deadline=None)
    @given(st.sampled_from(list(FunctionalForm)), st.floats(1e-2, 30.0), st.floats(0.1, 10.0))
    def test_slope_matches_difference_quotient(self, form, s, K):
        if form is FunctionalForm.LARGE_U:
            s = min(s, 0.6)
            if abs(math.log(s)) < 1e-2:
                s = 0.5
        h = 1e-5 * s
        fd = (functional_profile(form, s + h, K) - functional_profile(form, s - h, K)) / (2 * h)
        exact = functional_profile_slope(form, s, K, signed=True)
        assert fd == pytest.approx(exact, rel=1e-6, abs=1e-12)
        assert functional_profile_slope(form, s, K) == pytest.approx(abs(exact), rel=1e-15)
