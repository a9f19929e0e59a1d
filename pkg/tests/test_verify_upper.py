import math

import numpy as np
import pytest

from hamgrad.bounds import INF, BoundEnv, h0
from hamgrad.errors import ConfigurationError, ConsistencyError
from hamgrad.pde import Interval1D, RandomBumps, run
from hamgrad.solutions import (ExpTravel, FourierPositive, HeatKernelEuclidean, Rescaled, Scaled,
                               ShiftedGaussian, TimeShifted)
from hamgrad.verify import closed_form_battery, combine, verify_upper
from hamgrad.verify.battery import closed_form_cases, pde_runs, snapshot_times
from hamgrad.verify.sampling import ball_points, pair_indices, unit_ball_points, unit_times
from hamgrad.verify.upper import CSV_COLUMNS

ENV = BoundEnv(1, 0.0, 1.0, 1.0)


class TestSampling:
    def test_unit_ball(self):
        for dim in (1, 2, 3):
            p = unit_ball_points(dim, 64, 17)
            assert np.all(np.linalg.norm(p, axis=1) <= 1 + 1e-15)
            assert len(np.unique(p, axis=0)) == len(p)
            # the line along the first axis, endpoints included
            assert any(np.allclose(q, np.eye(dim)[0]) for q in p)
            assert any(np.allclose(q, 0.0) for q in p)

    def test_deterministic(self):
        np.testing.assert_array_equal(unit_ball_points(3), unit_ball_points(3))

    def test_times(self):
        t = unit_times(9, 1e-2)
        assert t[-1] == 1.0 and t[0] == pytest.approx(1e-2) and np.all(np.diff(t) > 0)

    def test_pairs(self):
        i, j = pair_indices(4)
        assert len(i) == 12 and np.all(i != j)
        i, j = pair_indices(50, 100)
        assert len(i) == 100


class TestExpAnchor:
    def test_analytic_sup(self):
        rep = verify_upper(ExpTravel(2.0), ENV, "h0", 4.0)
        assert rep.c_emp == pytest.approx(2.0, abs=1e-10)
        rec = rep.record(rep.argmax)
        assert rec.x == pytest.approx((0.5,)) and rec.t == 1.0
        assert rec.s == pytest.approx(1.0, abs=1e-12)
        assert rec.lhs == pytest.approx(4.0, rel=1e-14)
        assert rec.bound == pytest.approx(2.0, rel=1e-12)
        assert rep.violations == 0

    def test_higher_dimension(self):
        rep = verify_upper(ExpTravel(2.0, 3), BoundEnv(3, 0.0, 1.0, 1.0), "h0")
        assert rep.c_emp == pytest.approx(2.0, abs=1e-10)

    def test_violations_count(self):
        rep = verify_upper(ExpTravel(2.0), ENV, "h0", 1.5)
        assert rep.violations == int(np.count_nonzero(rep.lam > 1.5)) > 0
        assert all(r.lam > 1.5 for r in rep.violation_records())

    def test_summary_and_csv(self):
        rep = verify_upper(ExpTravel(2.0), ENV, "h0", 4.0)
        summ = rep.summary()
        assert {"c_emp", "violations", "argmax", "trial_C", "config"} <= set(summ)
        assert summ["argmax"]["s"] == pytest.approx(1.0)
        rows = list(rep.csv_rows())
        assert len(rows) == len(rep.lam) and len(rows[0]) == len(CSV_COLUMNS)
        assert CSV_COLUMNS == ("x", "t", "s", "lhs", "bound", "lambda")


class TestConventions:
    def test_zero_ratio_where_s_vanishes(self):
        f = ShiftedGaussian(0.5, 2)
        M = float(f.value([0.0, 0.0], 1.0))
        rep = verify_upper(f, BoundEnv(2, 0.0, 1.0, 1.0, M), "h0", times=[1.0])
        at0 = rep.s == 0
        assert at0.any()
        assert np.all(rep.lam[at0] == 0)
        assert np.all(rep.lhs[at0] <= 1e-12)

    def test_forward_direction_only(self):
        # s = 0 forces lhs = 0 only at interior maxima; a boundary max of the cylinder need not
        f = ExpTravel(2.0)
        pts = np.array([[0.0], [1.0]])
        rep = verify_upper(f, ENV, "h0", points=pts, times=[1.0])
        edge = rep.s == 0
        assert edge.any() and np.all(rep.lam[edge] == 0) and np.all(rep.lhs[edge] == 4.0)

    def test_all_finite_and_positive_bound(self):
        _, rep = closed_form_battery("h0")
        assert np.all(np.isfinite(rep.lam)) and np.all(np.isfinite(rep.bound))
        assert np.all(rep.bound[rep.s > 0] > 0)

    def test_infinite_ceiling_refused(self):
        with pytest.raises(ConfigurationError, match="tau0"):
            verify_upper(HeatKernelEuclidean(1), ENV, "h0")
        with pytest.raises(ConfigurationError):
            verify_upper(ShiftedGaussian(1.0), BoundEnv(1, 0.0, INF, 1.0), "h0")

    def test_ceiling_too_low(self):
        with pytest.raises(ConsistencyError):
            verify_upper(ExpTravel(1.0), BoundEnv(1, 0.0, 1.0, 1.0, 1.0), "h0")

    def test_dn_defaults_s_bar(self):
        rep = verify_upper(ExpTravel(1.0), ENV, "dn")
        assert rep.c_emp > 0 and np.isfinite(rep.c_emp)


class TestInvariance:
    @pytest.mark.parametrize("lam", [1e-3, 1.0, 1e3])
    @pytest.mark.parametrize("base", [ExpTravel(1.5), ShiftedGaussian(0.3, 2), FourierPositive(2.0)],
                             ids=lambda f: f.tag)
    def test_value_scaling(self, lam, base):
        env = BoundEnv(base.dim, 0.0, 1.0, 1.0)
        a = verify_upper(base, env, "h0")
        b = verify_upper(Scaled(base, lam), env, "h0")
        np.testing.assert_array_equal(a.x, b.x)
        np.testing.assert_allclose(b.s, a.s, rtol=1e-12, atol=1e-13)
        np.testing.assert_allclose(b.lam, a.lam, rtol=1e-12, atol=1e-13)
        assert b.c_emp == pytest.approx(a.c_emp, rel=1e-12)

    @pytest.mark.parametrize("base", [ExpTravel(1.5), ShiftedGaussian(0.3, 2), TimeShifted(HeatKernelEuclidean(3), 0.2)],
                             ids=lambda f: f.tag)
    def test_parabolic_scaling(self, base):
        mu = 2.0
        a = verify_upper(base, BoundEnv(base.dim, 0.0, 1.0, 1.0), "h0")
        b = verify_upper(Rescaled(base, mu), BoundEnv(base.dim, 0.0, mu, mu * mu), "h0")
        np.testing.assert_array_equal(b.x, mu * a.x)
        np.testing.assert_array_equal(b.t, mu * mu * a.t)
        np.testing.assert_array_equal(b.s, a.s)
        np.testing.assert_array_equal(b.lam, a.lam)


class TestBatteries:
    def test_closed_form(self):
        reports, rep = closed_form_battery("h0", trial_C=10.0)
        assert len(reports) == len(closed_form_cases())
        assert np.isfinite(rep.c_emp) and rep.violations == 0
        assert rep.c_emp == max(r.c_emp for r in reports)

    def test_global(self):
        reports, rep = closed_form_battery("h1", R=INF)
        assert np.isfinite(rep.c_emp)
        assert not any(c.family.tag == "exp" for c in closed_form_cases(global_only=True))

    def test_combine_counts(self):
        a = verify_upper(ExpTravel(2.0), ENV, "h0")
        b = verify_upper(ShiftedGaussian(1.0, 2), BoundEnv(2, 0.0, 1.0, 1.0), "h0")
        c = combine([a, b], 1.0)
        assert len(c.lam) == len(a.lam) + len(b.lam)
        assert c.x.shape[1] == 2
        assert c.violations == int(np.count_nonzero(np.concatenate([a.lam, b.lam]) > 1.0))


class TestRuns:
    def test_small_battery(self):
        runs, k = pde_runs("interval", range(3), 101)
        rep = verify_upper(runs, BoundEnv(1, k, 1.0, 1.0), "h0", trial_C=100.0)
        assert np.isfinite(rep.c_emp) and rep.violations == 0
        assert rep.config["source"]["seeds"] == [0, 1, 2]
        assert rep.notes

    def test_boundary_nodes_excluded(self):
        geom = Interval1D(1.0, -0.5)
        init = RandomBumps.draw(1, geom)
        res = run(geom, init, 0.1, 41, 0.01, [0.05, 0.1], ball=(0.0, 1.0))
        rep = verify_upper([res], BoundEnv(1, 0.0, 1.0, 0.1), "h0")
        assert rep.excluded == 2
        assert np.all(np.abs(rep.x[:, 0]) < 0.5)

    def test_radius_mismatch(self):
        runs, k = pde_runs("interval", [0], 51)
        with pytest.raises(ConfigurationError):
            verify_upper(runs, BoundEnv(1, 0.0, 2.0, 1.0), "h0")

    def test_snapshot_times_on_coarse_step(self):
        t = snapshot_times(1.0, 0.003)
        assert t[-1] == 1.0
        np.testing.assert_allclose(np.round(t[:-1] / 0.003) * 0.003, t[:-1], rtol=1e-12)
