"""Constructive lower bounds for the best Hamilton-type gradient ratio.

For a target (s, t, R) we build explicit positive solutions on B(0, R) whose
value at some (x, t) with |x| <= R/2 has log(M/u) = s, and report the largest
|grad u|^2/u^2 found.  Every candidate is re-evaluated through the family
itself so the claimed s is checked, not assumed.

Recipes
-------
exponential   u = exp(a x1 + a^2 tau), a = 2s/R, x = (R/2) e1 (finite R only)
gauss-far     Gaussian of width a at |x| = Rbar/2 with a solved from log(M/u) = s
              (used for 1 <= s <= R^2/t; Rbar = min(R, sqrt(s t)))
gauss-near    Gaussian at |x| = sqrt(t)/2 with a solved from psi(a) = s
              (used for s <= 1 and t <= R^2)
gauss-refined golden-section search over the Gaussian position
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from ..bounds import INF, h0, lower_envelope
from ..errors import ConfigurationError, ConsistencyError, DomainError
from ..solutions import ExpTravel, ShiftedGaussian, hamilton_point, sup_on_cylinder

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def bisect_decreasing(f, target, lo, hi, tol=1e-10, max_iter=400):
    """Root of f(a) = target for f decreasing on (0, inf), to relative tolerance ``tol``."""
    if not (lo > 0 and hi > lo):
        raise DomainError("need 0 < lo < hi")
    for _ in range(200):
        if f(lo) > target:
            break
        lo /= 4.0
    else:
        raise ConsistencyError("could not bracket from below")
    for _ in range(200):
        if f(hi) < target:
            break
        hi *= 4.0
    else:
        raise ConsistencyError("could not bracket from above")
    # bisect in log a: widths can be astronomically small for large s
    for _ in range(max_iter):
        mid = math.sqrt(lo * hi)
        if f(mid) > target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * hi:
            break
    return math.sqrt(lo * hi)


def golden_max(f, lo, hi, tol=1e-10, max_iter=300):
    """Maximize a unimodal f on [lo, hi]; returns (x, f(x))."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = c if fc >= fd else d
    best = max(fc, fd)
    if f(lo) > best:
        x, best = lo, f(lo)
    if f(hi) > best:
        x, best = hi, f(hi)
    return x, best


def psi_gauss(a, n, t):
    """log(M/u) for the Gaussian of width a observed at |x| = sqrt(t)/2, time t."""
    return 0.5 * n * math.log1p(t / a) + t / (16.0 * (t + a))


def gauss_s(a, n, t, rho):
    """log(M/u) for the Gaussian of width a observed at |x| = rho, time t."""
    return 0.5 * n * math.log1p(t / a) + rho**2 / (4.0 * (t + a))


def solve_width(s, n, t, rho, tol=1e-10):
    if not s > 0:
        raise DomainError("need s > 0")
    return bisect_decreasing(lambda a: gauss_s(a, n, t, rho), s, 1e-3 * t, 1e3 * t, tol)


@dataclass
class Candidate:
    recipe: str
    family: object
    x: np.ndarray
    t: float
    M: float
    s_target: float
    s_achieved: float
    lhs: float

    def as_dict(self):
        return {"recipe": self.recipe, "family": self.family.describe(), "x": self.x.tolist(),
                "t": self.t, "M": self.M, "s_target": self.s_target,
                "s_achieved": self.s_achieved, "lhs": self.lhs}


@dataclass
class LowerResult:
    s: float
    t: float
    R: float
    n: int
    candidates: list = field(default_factory=list)
    skipped: dict = field(default_factory=dict)

    @property
    def best(self) -> Candidate:
        return max(self.candidates, key=lambda c: c.lhs)

    @property
    def lhs(self) -> float:
        return self.best.lhs

    def by_recipe(self, name):
        for c in self.candidates:
            if c.recipe == name:
                return c
        return None

    def as_dict(self):
        return {"s": self.s, "t": self.t, "R": self.R, "n": self.n, "lhs": self.lhs,
                "best": self.best.recipe, "candidates": [c.as_dict() for c in self.candidates],
                "skipped": dict(self.skipped)}


def _evaluate(recipe, fam, x, t, R, s, rtol=1e-8):
    M = sup_on_cylinder(fam, np.zeros(fam.dim), R, t).value
    s_ach, lhs = hamilton_point(fam, x, t, M)
    if abs(s_ach - s) > rtol * max(1.0, s):
        raise ConsistencyError(f"{recipe}: achieved s={s_ach!r} for target {s!r}")
    if np.linalg.norm(x) > R / 2 * (1 + 1e-12):
        raise ConsistencyError(f"{recipe}: sample point outside B(0, R/2)")
    return Candidate(recipe, fam, np.asarray(x, float), t, M, s, s_ach, lhs)


def _gauss_at(recipe, s, t, R, n, rho):
    a = solve_width(s, n, t, rho)
    x = np.zeros(n)
    x[0] = rho
    return _evaluate(recipe, ShiftedGaussian(a, n), x, t, R, s)


def lower_search(s, t, R=INF, n=1, refine=True) -> LowerResult:
    """Run every applicable recipe at (s, t, R) and keep all candidates."""
    if not (s > 0 and t > 0 and R > 0):
        raise DomainError("need s > 0, t > 0, R > 0")
    if int(n) != n or n < 1:
        raise DomainError("dimension must be an integer >= 1")
    n = int(n)
    out = LowerResult(float(s), float(t), float(R), n)

    if math.isfinite(R):
        a = 2.0 * s / R
        x = np.zeros(n)
        x[0] = R / 2
        fam = ExpTravel(a, n)
        if a * R + a * a * t < 700.0:
            out.candidates.append(_evaluate("exponential", fam, x, t, R, s))
        else:
            # M would overflow: log M - log u = a R/2 and |grad u|/u = a exactly
            out.candidates.append(Candidate("exponential", fam, x, t, math.inf, s, a * R / 2, a * a))

    Rbar = min(R, math.sqrt(s * t))
    gauss = []
    if 1.0 <= s <= R**2 / t:
        gauss.append(("gauss-far", Rbar / 2))
    if s <= 1.0 and t <= R**2:
        gauss.append(("gauss-near", math.sqrt(t) / 2))
    try:
        for name, rho in gauss:
            out.candidates.append(_gauss_at(name, s, t, R, n, rho))
        if refine:
            # lhs vanishes at rho -> 0 and decays like 4 s^2 / rho^2 for large rho
            hi = R / 2 if math.isfinite(R) else 8.0 * math.sqrt(t * (1.0 + s))
            lo = min(1e-4 * math.sqrt(t), hi / 2)

            def obj(z):
                return _gauss_at("gauss-refined", s, t, R, n, math.exp(z)).lhs

            z, _ = golden_max(obj, math.log(lo), math.log(hi), tol=1e-9)
            out.candidates.append(_gauss_at("gauss-refined", s, t, R, n, math.exp(z)))
    except ConsistencyError as exc:
        # widths below the floating-point range (s far beyond n/2 * 700)
        out.skipped["gauss"] = str(exc)
    if not out.candidates:
        raise ConfigurationError("no recipe applies")
    return out


HMAP_COLUMNS = ("s", "t", "R", "n", "lower", "best_recipe", "envelope", "h0", "h0_over_lower")


@dataclass
class HMapResult:
    rows: list

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(HMAP_COLUMNS)
        for r in self.rows:
            w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in r])
        return buf.getvalue()

    @property
    def max_gap(self) -> float:
        return max(r[-1] for r in self.rows)


def hmap(s_values, t_values, R_values, n=1, refine=True) -> HMapResult:
    """Sharpness map: constructed lower value against the upper bound h0."""
    rows = []
    for R in R_values:
        for t in t_values:
            for s in s_values:
                res = lower_search(s, t, R, n, refine)
                lo = res.lhs
                up = h0(s, t, R)
                rows.append((float(s), float(t), float(R), int(n), lo, res.best.recipe,
                             float(lower_envelope(s, t, R)), float(up), float(up / lo)))
    return HMapResult(rows)
