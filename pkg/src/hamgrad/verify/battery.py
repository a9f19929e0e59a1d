"""Standard test batteries: closed-form families and seeded random PDE runs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..bounds import INF, BoundEnv
from ..pde import Interval1D, RadialHyperbolic, RandomBumps, run
from ..solutions import (ExpTravel, FourierPositive, HeatKernelEuclidean, HeatKernelH3,
                         ShiftedGaussian)
from .upper import VerificationReport, combine, verify_upper


@dataclass(frozen=True)
class BatteryCase:
    family: object
    n: int
    k: float
    tau0: float = 0.0
    x0: tuple | None = None


def closed_form_cases(global_only=False):
    """Families with finite suprema; ``global_only`` drops those unbounded on the whole space."""
    cases = []
    if not global_only:
        for n in (1, 3):
            for a in (0.5, 1.0, 2.0, 4.0):
                cases.append(BatteryCase(ExpTravel(a, n), n, 0.0))
    for n in (1, 2, 3):
        for a in (0.1, 0.5, 2.0):
            cases.append(BatteryCase(ShiftedGaussian(a, n), n, 0.0))
            cases.append(BatteryCase(ShiftedGaussian(a, n), n, 0.0, 0.0, (0.7,) + (0.0,) * (n - 1)))
    for n in (1, 3):
        for tau0 in (0.05, 0.5):
            cases.append(BatteryCase(HeatKernelEuclidean(n), n, 0.0, tau0))
            cases.append(BatteryCase(HeatKernelEuclidean(n), n, 0.0, tau0, (1.0,) + (0.0,) * (n - 1)))
    for tau0 in (0.05, 0.5):
        cases.append(BatteryCase(HeatKernelH3(), 3, 2.0, tau0))
        cases.append(BatteryCase(HeatKernelH3(), 3, 2.0, tau0, (1.0,)))
    for lam in (1.0, 3.0):
        cases.append(BatteryCase(FourierPositive(lam, 2.0, 1), 1, 0.0))
    return cases


def closed_form_battery(kind="h0", R=1.0, T=1.0, trial_C=None, sample_radius=3.0, cases=None):
    """One report per case, plus their combination."""
    if cases is None:
        cases = closed_form_cases(global_only=math.isinf(R))
    reports = []
    for c in cases:
        env = BoundEnv(c.n, c.k, R, T)
        kw = {"tau0": c.tau0, "x0": c.x0}
        if math.isinf(R):
            kw["sample_radius"] = sample_radius
        reports.append(verify_upper(c.family, env, kind, trial_C, **kw))
    return reports, combine(reports, trial_C)


INTERVAL = "interval"
HYPERBOLIC = "hyperbolic"


def battery_geometry(tag, R=1.0):
    """Domains of size 4R centered on the ball center 0."""
    if tag == INTERVAL:
        return Interval1D(4.0 * R, -2.0 * R), 0.0
    if tag == HYPERBOLIC:
        return RadialHyperbolic(3, 4.0 * R), 2.0
    raise ValueError(f"unknown battery geometry {tag!r}")


def snapshot_times(T, dt_coarse):
    # a fixed log-spaced set rounded to the coarse step so every resolution hits it
    raw = T * np.geomspace(1e-2, 1.0, 17)
    t = np.unique(np.maximum(np.round(raw / dt_coarse), 1) * dt_coarse)
    t[-1] = T
    return t


def pde_runs(tag, seeds, N, R=1.0, T=1.0, dt_factor=2.5, N_ref=None, scale=1.0):
    """Seeded random-bump runs; dt = dt_factor h^2 with h from ``N``.

    Snapshot times are fixed by the reference resolution ``N_ref`` (default N)
    so runs at different N are sampled at identical times.  ``scale``
    stretches the domain around the ball (sensitivity checks).
    """
    geom, k = battery_geometry(tag, R)
    if scale != 1.0:
        geom = geom.scaled(scale) if tag == HYPERBOLIC else Interval1D(geom.extent * scale, geom.origin * scale)
    h = geom.extent / (N - 1)
    dt = dt_factor * h * h
    N_ref = N if N_ref is None else N_ref
    h_ref = geom.extent / (N_ref - 1)
    times = snapshot_times(T, dt_factor * h_ref * h_ref)
    # the step must divide every snapshot time
    ratio = (dt_factor * h_ref * h_ref) / dt
    dt = dt_factor * h_ref * h_ref / max(1, round(ratio))
    # bumps are drawn over the unscaled domain so a stretched domain sees the same data
    base, _ = battery_geometry(tag, R)
    out = []
    for seed in seeds:
        init = RandomBumps.draw(seed, base)
        out.append(run(geom, init, T, N, dt, times, ball=(0.0, R),
                       meta={"seed": int(seed), "initial": init.as_dict()}))
    return out, k


def pde_battery(tag, seeds, N, R=1.0, T=1.0, kind="h0", trial_C=None, N_ref=None, scale=1.0):
    runs, k = pde_runs(tag, seeds, N, R, T, N_ref=N_ref, scale=scale)
    env = BoundEnv(1 if tag == INTERVAL else 3, k, R, T)
    return verify_upper(runs, env, kind, trial_C)


def refinement_study(tag, seeds, N, R=1.0, T=1.0, kind="h0"):
    """C_emp at N and 2N - 1 (grid spacing halved) on identical snapshot times."""
    coarse = pde_battery(tag, seeds, N, R, T, kind, N_ref=N)
    fine = pde_battery(tag, seeds, 2 * N - 1, R, T, kind, N_ref=N)
    change = abs(fine.c_emp - coarse.c_emp) / fine.c_emp
    return {"geometry": tag, "N": N, "N_fine": 2 * N - 1, "runs": len(list(seeds)),
            "c_emp_coarse": coarse.c_emp, "c_emp_fine": fine.c_emp, "relative_change": change,
            "argmax_fine": fine.summary()["argmax"], "excluded": fine.excluded}
