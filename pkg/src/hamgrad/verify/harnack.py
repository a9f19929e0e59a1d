"""Same-time pseudo-Harnack comparison and its sharpness constant.

The checked inequality is u(y,t) <= L M^(1-theta) u(x,t)^theta with
(theta, L) from :func:`hamgrad.bounds.pseudo_harnack`; it is evaluated in
log form.  The sharpness computation on heat kernels reduces to the sign of
C - 1/(32(1+C)), whose positive root is the critical constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..bounds import pseudo_harnack
from ..errors import DomainError
from .pairs import Source, base_points, in_half_ball
from .sampling import pair_indices

CRITICAL_EXACT = (3.0 - 2.0 * math.sqrt(2.0)) / (4.0 * math.sqrt(2.0))


def exponent_coefficient(C):
    return C - 1.0 / (32.0 * (1.0 + C))


def critical_constant(tol=1e-15):
    """Positive root of 32C^2 + 32C - 1 by bisection on [0, 1]."""
    p = lambda c: 32.0 * c * c + 32.0 * c - 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if p(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass
class FamilyScan:
    C: float
    n: int
    coefficient: float
    q: np.ndarray
    log_rhs: np.ndarray

    @property
    def holds(self) -> bool:
        return bool(np.all(self.log_rhs >= 0))

    @property
    def first_failure(self):
        bad = np.flatnonzero(self.log_rhs < 0)
        return float(self.q[bad[0]]) if bad.size else None

    def as_dict(self):
        return {"C": self.C, "n": self.n, "coefficient": self.coefficient,
                "coefficient_sign": int(np.sign(self.coefficient)), "holds": self.holds,
                "first_failure_q": self.first_failure,
                "q_min": float(self.q[0]), "q_max": float(self.q[-1])}


def family_scan(C, n, q=None):
    """log of 2^(1 + n(1-theta)/2) e^C exp[(C - 1/(32(1+C))) q] over q = R^2/tau.

    theta = 1/(1+C) is the exponent of the pseudo-Harnack inequality at
    distance d = R.  The inequality 1 <= RHS holds iff the log is >= 0.
    """
    if not C > 0:
        raise DomainError("C must be > 0")
    q = np.geomspace(1e-3, 1e6, 400) if q is None else np.asarray(q, float)
    theta = 1.0 / (1.0 + C)
    coef = exponent_coefficient(C)
    log_rhs = (1.0 + n * (1.0 - theta) / 2.0) * math.log(2.0) + C + coef * q
    return FamilyScan(float(C), int(n), float(coef), q, log_rhs)


@dataclass
class HarnackReport:
    C: float
    checked: int
    skipped: int
    violations: int
    worst_margin: float
    config: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def as_dict(self):
        return {"C": self.C, "checked": self.checked, "skipped": self.skipped,
                "violations": self.violations, "worst_margin": self.worst_margin,
                "passed": self.passed, "config": self.config}


def harnack_check(src: Source, R, k, C, *, n_quasi=24, n_line=9, extra_y=None) -> HarnackReport:
    """Check the inequality over all ordered pairs of base points at each sample time.

    ``worst_margin`` is the smallest value of log(RHS) - log(u(y,t)); it is
    negative exactly when a violation occurs.
    """
    pts = base_points(src, R, n_quasi, n_line)
    i, j = pair_indices(len(pts))
    # include x = y pairs explicitly
    i = np.concatenate([np.arange(len(pts)), i])
    j = np.concatenate([np.arange(len(pts)), j])
    x, y = pts[i], pts[j]
    if extra_y is not None:
        ex, ey = extra_y
        x, y = np.vstack([x, ex]), np.vstack([y, ey])
    keep = in_half_ball(src, x, R) & in_half_ball(src, y, R)
    skipped = int(np.count_nonzero(~keep)) * len(src.times)
    x, y = x[keep], y[keep]
    d = src.dist(x, y)
    worst, viol, checked = math.inf, 0, 0
    for t in src.times:
        ux, uy = src.value(x, t), src.value(y, t)
        theta, L = pseudo_harnack(d, R, t, k, C)
        log_rhs = np.log(L) + (1.0 - theta) * math.log(src.M) + theta * np.log(ux)
        margin = log_rhs - np.log(uy)
        # ties at x = y are exact; allow rounding in the logs
        bad = margin < -1e-12 * np.maximum(1.0, np.abs(log_rhs))
        viol += int(np.count_nonzero(bad))
        worst = min(worst, float(margin.min()))
        checked += margin.size
    return HarnackReport(float(C), checked, skipped, viol, worst,
                         {"source": src.description, "R": R, "k": k, "M": src.M})


def minimal_constant(check, lo=1e-8, hi=1.0, rtol=1e-6, max_hi=1e6):
    """Smallest C with check(C).passed, assuming monotonicity in C."""
    while not check(hi).passed:
        hi *= 2.0
        if hi > max_hi:
            return math.inf
    if check(lo).passed:
        return lo
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if check(mid).passed:
            hi = mid
        else:
            lo = mid
    return hi
