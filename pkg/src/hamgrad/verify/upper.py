"""Upper-bound certification: scan |grad u|^2/u^2 against a bound over a cylinder.

The ratio Lambda = lhs / bound at each sample is the pointwise candidate for
the unspecified dimensional constant; its supremum is the empirical constant
``c_emp``.  Samples with s = 0 carry Lambda = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..bounds import INF, BoundEnv, BoundKind, evaluate_bound
from ..errors import ConfigurationError, ConsistencyError
from ..pde import CIRCLE, RunResult, gradient_field
from ..solutions import ClosedFormFamily, sup_on_cylinder
from .sampling import ball_points, unit_times

CSV_COLUMNS = ("x", "t", "s", "lhs", "bound", "lambda")


@dataclass(frozen=True)
class RatioRecord:
    x: tuple
    t: float
    s: float
    lhs: float
    bound: float
    lam: float


@dataclass
class VerificationReport:
    x: np.ndarray
    t: np.ndarray
    s: np.ndarray
    lhs: np.ndarray
    bound: np.ndarray
    lam: np.ndarray
    trial_C: float | None
    config: dict
    excluded: int = 0
    notes: list = field(default_factory=list)

    @property
    def c_emp(self) -> float:
        return float(self.lam.max()) if self.lam.size else 0.0

    @property
    def argmax(self) -> int:
        return int(np.argmax(self.lam)) if self.lam.size else -1

    @property
    def violations(self) -> int:
        if self.trial_C is None:
            return 0
        return int(np.count_nonzero(self.lam > self.trial_C))

    def record(self, i) -> RatioRecord:
        return RatioRecord(tuple(map(float, self.x[i])), float(self.t[i]), float(self.s[i]),
                           float(self.lhs[i]), float(self.bound[i]), float(self.lam[i]))

    @property
    def records(self):
        return [self.record(i) for i in range(self.lam.size)]

    def violation_records(self):
        if self.trial_C is None:
            return []
        return [self.record(i) for i in np.flatnonzero(self.lam > self.trial_C)]

    def summary(self) -> dict:
        out = {
            "c_emp": self.c_emp,
            "violations": self.violations,
            "trial_C": self.trial_C,
            "n_records": int(self.lam.size),
            "excluded": self.excluded,
            "config": self.config,
            "notes": list(self.notes),
        }
        if self.lam.size:
            r = self.record(self.argmax)
            out["argmax"] = {"x": list(r.x), "t": r.t, "s": r.s, "lhs": r.lhs, "bound": r.bound}
        else:
            out["argmax"] = None
        return out

    def csv_rows(self):
        for i in range(self.lam.size):
            yield (self.x[i], self.t[i], self.s[i], self.lhs[i], self.bound[i], self.lam[i])


def _lambda(s, lhs, bound):
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = np.where(s > 0, lhs / bound, 0.0)
    return lam


def _bound(kind, s, t, R, k, s_bar, alpha):
    return np.asarray(evaluate_bound(kind, s, t, R, k, s_bar=s_bar, alpha=alpha), dtype=float)


def scan_family(family: ClosedFormFamily, env: BoundEnv, kind="h0", trial_C=None, *, x0=None,
                tau0=0.0, points=None, times=None, sample_radius=None, s_bar=None, alpha=None,
                n_quasi=256, n_line=65, n_times=33) -> VerificationReport:
    kind = BoundKind(kind)
    dim = family.dim
    x0 = np.zeros(dim) if x0 is None else np.broadcast_to(np.asarray(x0, float), (dim,))
    R_bound = INF if kind is BoundKind.H1_GLOBAL else env.R
    sup = sup_on_cylinder(family, x0, env.R, env.T, tau0)
    M = env.M if env.M is not None else sup.value
    if not math.isfinite(M):
        raise ConfigurationError(f"ceiling M is not finite: {sup.note or 'unbounded supremum'}")
    if points is None:
        if math.isinf(env.R):
            if sample_radius is None:
                raise ConfigurationError("R = inf needs an explicit sample_radius")
            rad = sample_radius
        else:
            rad = env.R / 2
        points = ball_points(dim, x0, rad, n_quasi, n_line)
    pts = np.asarray(points, dtype=float)
    ts = env.T * unit_times(n_times) if times is None else np.asarray(times, dtype=float)
    P = np.repeat(pts, len(ts), axis=0)
    Tt = np.tile(ts, len(pts))
    u = family.value(P, Tt + tau0)
    if np.any(u > M * (1 + 1e-12)):
        raise ConsistencyError("a sample exceeds the ceiling M")
    g = np.linalg.norm(family.grad(P, Tt + tau0), axis=-1)
    # values below the normal floating-point range carry no usable log-ratio
    ok = (u >= np.finfo(float).tiny) & np.isfinite(g)
    dropped = int(np.count_nonzero(~ok))
    P, Tt, u, g = P[ok], Tt[ok], u[ok], g[ok]
    s = np.maximum(math.log(M) - np.log(u), 0.0)
    lhs = (g / u) ** 2
    if kind is BoundKind.DN and s_bar is None:
        s_bar = float(s.max())
    bound = _bound(kind, s, Tt, R_bound, env.k, s_bar, alpha)
    cfg = {"source": family.describe(), "kind": kind.value, "n": env.n, "k": env.k,
           "R": env.R, "T": env.T, "M": M, "M_exact": sup.exact, "tau0": tau0,
           "x0": list(map(float, x0))}
    rep = VerificationReport(P, Tt, s, lhs, bound, _lambda(s, lhs, bound), trial_C, cfg, dropped)
    if sup.note:
        rep.notes.append(sup.note)
    if dropped:
        rep.notes.append(f"{dropped} samples excluded: value underflowed")
    return rep


def scan_runs(runs, env: BoundEnv, kind="h0", trial_C=None, *, s_bar=None, alpha=None) -> VerificationReport:
    """Scan discrete fields; M is each run's tracked maximum over B(x0, R)."""
    kind = BoundKind(kind)
    if isinstance(runs, RunResult):
        runs = [runs]
    xs, ts, ss, ls, bs = [], [], [], [], []
    excluded = 0
    for run in runs:
        center, Rr = run.meta["ball"]
        if not math.isclose(Rr, env.R):
            raise ConfigurationError("run was tracked on a different ball radius")
        M = run.M if env.M is None else env.M
        t0 = run.meta.get("t0", 0.0)
        grid = run.grid
        d = np.abs(grid.nodes - center)
        if grid.geometry.tag == CIRCLE:
            L = grid.geometry.extent
            d = np.abs((grid.nodes - center + L / 2) % L - L / 2)
        sel = d <= env.R / 2 * (1 + 1e-12)
        if grid.geometry.tag != CIRCLE:
            edge = np.zeros(grid.N, dtype=bool)
            edge[-1] = True
            if not grid.geometry.radial:
                edge[0] = True
            excluded += int(np.count_nonzero(sel & edge))
            sel &= ~edge
        for snap in run.snapshots:
            t = snap.time - t0
            if t <= 0:
                continue
            u = snap.u[sel]
            if np.any(u > M * (1 + 1e-12)):
                raise ConsistencyError("field exceeds its tracked maximum")
            g = gradient_field(snap)[sel]
            xs.append(grid.nodes[sel])
            ts.append(np.full(u.size, t))
            ss.append(np.maximum(np.log(M / u), 0.0))
            ls.append((g / u) ** 2)
    x = np.concatenate(xs)[:, None]
    t = np.concatenate(ts)
    s = np.concatenate(ss)
    lhs = np.concatenate(ls)
    if kind is BoundKind.DN and s_bar is None:
        s_bar = float(s.max())
    R_bound = INF if kind is BoundKind.H1_GLOBAL else env.R
    bound = _bound(kind, s, t, R_bound, env.k, s_bar, alpha)
    cfg = {"source": {"runs": len(runs), "geometry": runs[0].meta["geometry"],
                      "seeds": [r.meta.get("seed") for r in runs], "N": runs[0].meta["N"]},
           "kind": kind.value, "n": env.n, "k": env.k, "R": env.R, "T": env.T}
    rep = VerificationReport(x, t, s, lhs, bound, _lambda(s, lhs, bound), trial_C, cfg, excluded)
    rep.notes.append("discrete M is a sampled maximum; it can only underestimate sup u, "
                     "which makes the check conservative")
    return rep


def verify_upper(source, env: BoundEnv, kind="h0", trial_C=None, **kw) -> VerificationReport:
    """Scan a closed-form family or a sequence of PDE runs over Q_{R/2,T}."""
    if isinstance(source, ClosedFormFamily):
        return scan_family(source, env, kind, trial_C, **kw)
    return scan_runs(source, env, kind, trial_C, **kw)


def combine(reports, trial_C=None) -> VerificationReport:
    """Concatenate reports into one battery report (sup over all records)."""
    reports = list(reports)
    dims = {r.x.shape[1] for r in reports}
    width = max(dims)
    xs = [np.pad(r.x, ((0, 0), (0, width - r.x.shape[1]))) for r in reports]
    cat = lambda name: np.concatenate([getattr(r, name) for r in reports])
    cfg = {"battery": [r.config for r in reports]}
    return VerificationReport(np.concatenate(xs), cat("t"), cat("s"), cat("lhs"), cat("bound"),
                              cat("lam"), trial_C, cfg, sum(r.excluded for r in reports))
