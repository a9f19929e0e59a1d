"""Heat-kernel checks: logarithmic gradient bound, two-sided Gaussian bound, Li-Yau.

The kernel bound is |grad G|^2 / G^2 <= (C/t)(1 + d^2/t).  In flat space
the ratio of the two sides is (q/4)/(1+q) with q = d^2/t, so the minimal
admissible C is 1/4, approached as q -> inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from ..bounds import inv_sq
from ..errors import DomainError
from ..solutions import HeatKernelEuclidean, HeatKernelH3
from .sampling import ball_points, unit_times

EUCLID_LIMIT = 0.25


def h3_ball_volume(r):
    """Volume of a geodesic ball of radius r in hyperbolic 3-space."""
    r = np.asarray(r, dtype=float)
    return np.pi * (np.sinh(2.0 * r) - 2.0 * r)


def h3_ball_volume_quad(r):
    return integrate.quad(lambda x: 4.0 * math.pi * math.sinh(x) ** 2, 0.0, r, epsabs=0, epsrel=1e-13)[0]


def euclid_ball_volume(r, n):
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1) * np.asarray(r, float) ** n


@dataclass
class KernelReport:
    kind: str
    c_emp: float
    argmax: dict
    trial_C: float | None
    violations: int
    grid: dict
    two_sided: dict | None = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.violations == 0

    def as_dict(self):
        return {"kind": self.kind, "c_emp": self.c_emp, "argmax": self.argmax, "trial_C": self.trial_C,
                "violations": self.violations, "grid": self.grid, "two_sided": self.two_sided,
                "extra": self.extra}


def _kernel(kind, n):
    if kind == "euclid":
        return HeatKernelEuclidean(n)
    if kind == "h3":
        return HeatKernelH3()
    raise DomainError(f"unknown kernel kind {kind!r}")


def _volume(kind, r, n):
    return h3_ball_volume(r) if kind == "h3" else euclid_ball_volume(r, n)


def kernel_check(kind="euclid", trial_C=None, delta=None, *, n=3, d_max=6.0, t_min=1e-3, t_max=10.0,
                 n_d=241, n_t=121) -> KernelReport:
    """Scan |grad G|^2/G^2 against (1/t)(1 + d^2/t) over a (d, t) grid."""
    if delta is not None and not (0.0 < delta < 4.0):
        raise DomainError("delta must lie in (0, 4)")
    G = _kernel(kind, n)
    dim = G.dim
    d = np.concatenate([[0.0], np.geomspace(1e-4, d_max, n_d - 1)])
    t = np.geomspace(t_min, t_max, n_t)
    D, T = np.meshgrid(d, t, indexing="ij")
    x = np.zeros(D.shape + (dim,))
    x[..., 0] = D
    u = G.value(x, T)
    # far tails underflow to zero; those cells are excluded and counted
    ok = u > 1e-290
    safe = np.where(ok, u, 1.0)
    lhs = np.where(ok, np.sum((G.grad(x, T) / safe[..., None]) ** 2, axis=-1), 0.0)
    rhs = (1.0 / T) * (1.0 + D**2 / T)
    ratio = np.where(ok, lhs / rhs, 0.0)
    i = np.unravel_index(np.argmax(ratio), ratio.shape)
    c_emp = float(ratio[i])
    extra = {}
    if kind == "euclid":
        q = np.concatenate([[0.0], np.geomspace(1e-6, 1e12, 2001)])
        grid_sup = float(np.max((q / 4) / (1 + q)))
        extra = {"q_grid_sup": grid_sup, "analytic_limit": EUCLID_LIMIT,
                 "minimal_C": max(grid_sup, EUCLID_LIMIT),
                 "family_vs_formula": float(np.max(np.where(ok, np.abs(lhs - D**2 / (4 * T**2)) / rhs, 0.0)))}
    extra["excluded_underflow"] = int(np.count_nonzero(~ok))
    violations = 0 if trial_C is None else int(np.count_nonzero(ratio > trial_C))
    two = None
    if delta is not None:
        V = _volume(kind, np.sqrt(T), n)
        # log form: u underflows long before the Gaussian factors do
        with np.errstate(divide="ignore"):
            logu = np.log(u)
        logV = np.log(V)
        up = np.exp(np.where(ok, logu + logV + D**2 / ((4.0 + delta) * T), -np.inf))
        lo = np.exp(np.where(ok, logu + logV + D**2 / ((4.0 - delta) * T), np.inf))
        two = {"delta": delta, "c1": float(up.max()), "c2": float(lo.min()),
               "c2_argmin": {"d": float(D[np.unravel_index(np.argmin(lo), lo.shape)]),
                             "t": float(T[np.unravel_index(np.argmin(lo), lo.shape)])}}
    grid = {"d_max": d_max, "t_min": t_min, "t_max": t_max, "n_d": n_d, "n_t": n_t, "n": n}
    return KernelReport(kind, c_emp, {"d": float(D[i]), "t": float(T[i])}, trial_C, violations, grid, two, extra)


@dataclass
class LiYauReport:
    alpha: float
    sup_lhs: float
    c_emp: float
    lhs: np.ndarray
    t: np.ndarray
    config: dict

    def as_dict(self):
        return {"alpha": self.alpha, "sup_lhs": self.sup_lhs, "c_emp": self.c_emp,
                "n_records": int(self.lhs.size), "config": self.config}


def li_yau_check(family, alpha, R, T, k=0.0, *, x0=None, tau0=0.0, sample_radius=None,
                 n_quasi=128, n_line=33, n_times=33) -> LiYauReport:
    """|grad u|^2/u^2 - alpha u_t/u over the half cylinder, against 1/R^2 + 1/t + k."""
    if not alpha >= 1:
        raise DomainError("alpha must be >= 1")
    dim = family.dim
    x0 = np.zeros(dim) if x0 is None else np.broadcast_to(np.asarray(x0, float), (dim,))
    rad = R / 2 if math.isfinite(R) else sample_radius
    if rad is None:
        raise DomainError("R = inf needs an explicit sample_radius")
    pts = ball_points(dim, x0, rad, n_quasi, n_line)
    ts = T * unit_times(n_times)
    P = np.repeat(pts, len(ts), axis=0)
    Tt = np.tile(ts, len(pts))
    u = family.value(P, Tt + tau0)
    ok = u > 1e-290
    excluded = int(np.count_nonzero(~ok))
    P, Tt, u = P[ok], Tt[ok], u[ok]
    lhs = np.sum((family.grad(P, Tt + tau0) / u[:, None]) ** 2, axis=-1) - alpha * family.u_t(P, Tt + tau0) / u
    bound = inv_sq(R) + 1.0 / Tt + k
    return LiYauReport(float(alpha), float(lhs.max()), float((lhs / bound).max()), lhs, Tt,
                       {"source": family.describe(), "R": R, "T": T, "k": k, "tau0": tau0,
                        "excluded_underflow": excluded})
