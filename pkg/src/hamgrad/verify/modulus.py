"""Modulus-of-continuity checks and the elementary implication lemma.

The lemma: for a, b, mu >= 0 and lambda >= 1,
    a + mu <= lambda (b + mu)  implies  a^2 <= lambda^4 b^2 + (lambda^2 - 1) mu^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..bounds import modulus_psi, modulus_radius
from .pairs import Source, base_points, in_half_ball, offsets


def check_implication(a, b, mu, lam):
    """(hypothesis holds, conclusion holds, hypothesis lhs/rhs, conclusion lhs/rhs)."""
    hyp_l, hyp_r = a + mu, lam * (b + mu)
    con_l, con_r = a * a, lam**4 * b * b + (lam * lam - 1.0) * mu * mu
    return hyp_l <= hyp_r, con_l <= con_r, (hyp_l, hyp_r), (con_l, con_r)


def implication_counterexamples(n=100_000, seed=0, scale=10.0):
    """Count samples satisfying the hypothesis but not the conclusion.

    a is drawn uniformly below the hypothesis limit lambda(b+mu) - mu, with a
    quarter of the draws placed exactly on the limit.  Returns
    (counterexamples, samples).
    """
    rng = np.random.default_rng(seed)
    b = rng.uniform(0.0, scale, n)
    mu = rng.uniform(0.0, scale, n)
    lam = 1.0 + rng.exponential(0.5, n)
    top = lam * (b + mu) - mu
    a = rng.uniform(0.0, 1.0, n) * top
    edge = rng.uniform(size=n) < 0.25
    a[edge] = top[edge]
    a = np.maximum(a, 0.0)
    hyp = a + mu <= lam * (b + mu)
    con_r = lam**4 * b * b + (lam * lam - 1.0) * mu * mu
    # relative slack for the boundary draws, where both sides agree to rounding
    bad = hyp & (a * a > con_r * (1.0 + 1e-12))
    return int(np.count_nonzero(bad)), int(np.count_nonzero(hyp))


@dataclass
class ModulusReport:
    C: float
    c: float
    checked: int
    skipped: int
    violations: int
    worst_excess: float
    modulus1a_checked: int = 0
    modulus1a_violations: int = 0
    config: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.modulus1a_violations == 0

    def as_dict(self):
        return {"C": self.C, "c": self.c, "checked": self.checked, "skipped": self.skipped,
                "violations": self.violations, "worst_excess": self.worst_excess,
                "modulus1a_checked": self.modulus1a_checked,
                "modulus1a_violations": self.modulus1a_violations,
                "passed": self.passed, "config": self.config}


def modulus_check(src: Source, R, k, C, c, *, n_quasi=24, n_line=9, branch=None,
                  segment_points=17) -> ModulusReport:
    """|u(x,t) - u(y,t)|/u(x,t) <= psi(d(x,y)) for d(x,y) up to the admissible radius.

    Pairs are taken along fixed directions at fractions of the radius, d = 0
    and d = radius included.  ``branch`` in {None, 1, 2} restricts base points
    to u <= M/2 (1) or u >= M/2 (2).  The intermediate inequality
    log(M/u(x2)) <= lambda^4 log(M/u(x1)) + (lambda^2 - 1) K^2, lambda = e^{C d/R},
    is checked on branch-1 pairs whose segment stays below 3M/4.
    """
    M = src.M
    pts = base_points(src, R, n_quasi, n_line)
    checked = skipped = viol = m1_checked = m1_viol = 0
    worst = -math.inf
    for t in src.times:
        ux_base = src.value(pts, t)
        mask = np.ones(len(pts), dtype=bool)
        if branch == 1:
            mask = ux_base <= M / 2
        elif branch == 2:
            mask = ux_base >= M / 2
        if not mask.any():
            continue
        xb, ub = pts[mask], ux_base[mask]
        rad = np.asarray(modulus_radius(ub, M, R, t, k, c), dtype=float).reshape(-1)
        x, y, owner = offsets(src, xb, rad)
        keep = in_half_ball(src, y, R)
        skipped += int(np.count_nonzero(~keep))
        x, y, owner = x[keep], y[keep], owner[keep]
        if not len(x):
            continue
        ux = ub[owner]
        uy = src.value(y, t)
        d = src.dist(x, y)
        inc = np.abs(ux - uy) / ux
        psi = np.asarray(modulus_psi(d, ux, M, R, t, k, C), dtype=float).reshape(-1)
        excess = inc - psi
        bad = excess > 1e-12 * np.maximum(1.0, psi)
        viol += int(np.count_nonzero(bad))
        checked += len(x)
        worst = max(worst, float(excess.max()))

        # intermediate inequality on the small-u branch
        small = (ux <= M / 2) & (d > 0)
        if small.any():
            xs, ys, ds = x[small], y[small], d[small]
            s_frac = np.linspace(0.0, 1.0, segment_points)
            seg = xs[:, None, :] + s_frac[None, :, None] * (ys - xs)[:, None, :]
            useg = src.value(seg.reshape(-1, src.dim), t).reshape(len(xs), segment_points)
            ok = useg.max(axis=1) <= 0.75 * M
            if ok.any():
                ua, ub2 = src.value(xs[ok], t), src.value(ys[ok], t)
                u1, u2 = np.maximum(ua, ub2), np.minimum(ua, ub2)
                lam = np.exp(C * ds[ok] / R)
                K2 = R**2 * (1.0 / t + k)
                lhs = np.log(M / u2)
                rhs = lam**4 * np.log(M / u1) + (lam**2 - 1.0) * K2
                m1_checked += int(ok.sum())
                m1_viol += int(np.count_nonzero(lhs > rhs * (1 + 1e-12)))
    return ModulusReport(float(C), float(c), checked, skipped, viol,
                         worst if checked else 0.0, m1_checked, m1_viol,
                         {"source": src.description, "R": R, "k": k, "M": M, "branch": branch})


def maximal_radius_constant(check, lo=1e-6, hi=1.0, rtol=1e-6, max_hi=1e3):
    """Largest c with check(c).passed, assuming larger c makes the check harder."""
    if not check(lo).passed:
        return 0.0
    while check(hi).passed:
        lo = hi
        hi *= 2.0
        if hi > max_hi:
            return math.inf
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if check(mid).passed:
            lo = mid
        else:
            hi = mid
    return lo
