"""The Bernstein auxiliary function g and numerical checks of its properties.

    g(s) = g1(s)/R + K g2(s),   K = aux_time^{-1/2} + k^{1/2}
    g1 = s log(e + 1/s),        g2 = s (s+1)^{-1/2} log^{1/2}(e + 1/s)

F1 = g (g' - g'') must be comparable to F2 = |g - g'|/R + B with
B = R^{-2} + 1/aux_time + k, uniformly in (s, R, aux_time, k).

``aux_time`` is the time parameter fixed inside the maximum-principle
argument, not the time of any particular solution.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import DomainError

E = math.e


@dataclass(frozen=True)
class AuxParams:
    R: float
    aux_time: float
    k: float = 0.0

    def __post_init__(self):
        if not (self.R > 0 and self.aux_time > 0 and self.k >= 0):
            raise DomainError("need R > 0, aux_time > 0, k >= 0")

    @property
    def K(self):
        return self.aux_time**-0.5 + math.sqrt(self.k)

    @property
    def B(self):
        return self.R**-2 + 1.0 / self.aux_time + self.k


@dataclass(frozen=True)
class GValues:
    g1: np.ndarray
    dg1: np.ndarray
    d2g1: np.ndarray
    g2: np.ndarray
    dg2: np.ndarray
    d2g2: np.ndarray
    g: np.ndarray
    dg: np.ndarray
    d2g: np.ndarray


def _ell(s):
    # log(e + 1/s) without cancellation at either end
    return 1.0 + np.log1p(1.0 / (E * s))


def g_parts(s):
    """g1, g2 and their first two derivatives in closed form."""
    s = np.asarray(s, dtype=float)
    if np.any(~(s > 0)):
        raise DomainError("s must be > 0")
    ell = _ell(s)
    Es = E * s + 1.0

    g1 = s * ell
    dg1 = ell - 1.0 / Es
    d2g1 = -1.0 / (s * Es**2)

    g2 = s * ell**0.5 / np.sqrt(s + 1.0)
    D = ell * s * Es
    A = 1.0 / s - 0.5 / (s + 1.0) - 0.5 / D
    dg2 = g2 * A
    # A^2 + A' with the 1/s^2 terms cancelled by hand
    A2dA = (
        0.75 / (s + 1.0) ** 2
        - 1.0 / (s * (s + 1.0))
        - 1.0 / (s * D)
        + 0.5 / ((s + 1.0) * D)
        + (0.25 + 0.5 * (ell * (2.0 * E * s + 1.0) - 1.0)) / D**2
    )
    d2g2 = g2 * A2dA
    return g1, dg1, d2g1, g2, dg2, d2g2


def g_eval(s, p: AuxParams) -> GValues:
    g1, dg1, d2g1, g2, dg2, d2g2 = g_parts(s)
    a, K = 1.0 / p.R, p.K
    return GValues(
        g1, dg1, d2g1, g2, dg2, d2g2,
        a * g1 + K * g2, a * dg1 + K * dg2, a * d2g1 + K * d2g2,
    )


def F_pair(s, p: AuxParams):
    v = g_eval(s, p)
    F1 = v.g * (v.dg - v.d2g)
    F2 = np.abs(v.g - v.dg) / p.R + p.B
    return F1, F2


@dataclass
class AuxScanResult:
    ratio_min: float
    ratio_max: float
    argmin: tuple
    argmax: tuple
    grid: dict
    excluded: int = 0
    rows: np.ndarray | None = field(default=None, repr=False)

    @property
    def spread(self):
        return self.ratio_max / self.ratio_min

    def summary(self) -> dict:
        return {
            "ratio_min": self.ratio_min,
            "ratio_max": self.ratio_max,
            "spread": self.spread,
            "argmin": dict(zip(("s", "R", "aux_time", "k"), self.argmin)),
            "argmax": dict(zip(("s", "R", "aux_time", "k"), self.argmax)),
            "grid": self.grid,
            "excluded": self.excluded,
        }


CSV_COLUMNS = ("s", "R", "tau", "k", "F1", "F2", "ratio")


def comparability_scan(s_values, R_values, tau_values, k_values, keep_rows=False) -> AuxScanResult:
    """Min and max of F1/F2 over the tensor grid, in index order."""
    s = np.asarray(s_values, dtype=float).ravel()
    Rs = np.asarray(R_values, dtype=float).ravel()
    taus = np.asarray(tau_values, dtype=float).ravel()
    ks = np.asarray(k_values, dtype=float).ravel()
    if min(map(len, (s, Rs, taus, ks))) == 0:
        raise DomainError("scan grid is empty")
    if np.any(s < 1e-8) or np.any(s > 1e8):
        raise DomainError("s range must lie within [1e-8, 1e8]")
    S, Rg, Tg, Kg = np.meshgrid(s, Rs, taus, ks, indexing="ij")
    S, Rg, Tg, Kg = (a.ravel() for a in (S, Rg, Tg, Kg))

    g1, dg1, d2g1, g2, dg2, d2g2 = g_parts(S)
    a = 1.0 / Rg
    K = Tg**-0.5 + np.sqrt(Kg)
    B = Rg**-2 + 1.0 / Tg + Kg
    g, dg, d2g = a * g1 + K * g2, a * dg1 + K * dg2, a * d2g1 + K * d2g2
    F1 = g * (dg - d2g)
    F2 = np.abs(g - dg) * a + B
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = F1 / F2
    ok = np.isfinite(ratio) & (ratio > 0)
    excluded = int(np.count_nonzero(~ok))
    if excluded:
        warnings.warn(f"{excluded} grid points excluded (non-finite or non-positive ratio)")
    idx = np.flatnonzero(ok)
    imin = idx[np.argmin(ratio[idx])]
    imax = idx[np.argmax(ratio[idx])]
    loc = lambda i: (float(S[i]), float(Rg[i]), float(Tg[i]), float(Kg[i]))
    rows = np.column_stack([S, Rg, Tg, Kg, F1, F2, ratio]) if keep_rows else None
    grid = {
        "s_min": float(s.min()), "s_max": float(s.max()), "s_points": int(s.size),
        "R": Rs.tolist(), "aux_time": taus.tolist(), "k": ks.tolist(),
    }
    return AuxScanResult(float(ratio[imin]), float(ratio[imax]), loc(imin), loc(imax), grid, excluded, rows)


def scan_rows_csv(result: AuxScanResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in result.rows:
        w.writerow([f"{v:.17g}" for v in row])
    return buf.getvalue()


def asymptotic_claims(s):
    """Ratio of each derivative to its claimed asymptotic shape, as (min, max) over ``s``."""
    s = np.asarray(s, dtype=float)
    g1, dg1, d2g1, g2, dg2, d2g2 = g_parts(s)
    ell = _ell(s)
    claims = {
        "g1'": (dg1, ell),
        "g1''": (d2g1, -1.0 / (s * (s + 1.0) ** 2)),
        "g2'": (dg2, ell**0.5 / np.sqrt(s + 1.0)),
        "g2''": (d2g2, -1.0 / (s * np.sqrt(s + 1.0) * ell**0.5)),
    }
    out = {}
    for name, (actual, shape) in claims.items():
        r = actual / shape
        out[name] = (float(r.min()), float(r.max()))
    return out


@dataclass
class TailReport:
    """Integral of 1/g along a geometric ladder of endpoints."""

    endpoints: list
    values: list
    model: str
    slope: float
    residuals: dict
    divergent: bool
    last_slope: float

    def as_dict(self):
        return {
            "endpoints": self.endpoints, "values": self.values, "model": self.model,
            "slope": self.slope, "residuals": self.residuals,
            "divergent": self.divergent, "last_slope": self.last_slope,
        }


@dataclass
class QuadResult:
    value: float
    abserr: float
    converged: bool
    message: str = ""
    lower_tail: TailReport | None = None
    upper_tail: TailReport | None = None


def _integrate_inv_g(lo, hi, p, rtol):
    # substitute x = log(tau); integrand tau / g(tau)
    if lo == hi:
        return 0.0, 0.0, True, ""

    def f(x):
        t = math.exp(x)
        return t / float(g_eval(t, p).g)

    val, err, info = integrate.quad(f, math.log(lo), math.log(hi), epsabs=0.0, epsrel=rtol, limit=500, full_output=1)[:3]
    msg = ""
    if isinstance(info, dict) and info.get("neval", 0) and err > max(rtol * abs(val), 1e-14):
        msg = f"quadrature error estimate {err:.3g} exceeds tolerance"
    return val, err, not msg, msg


_GROWTH_MODELS = {
    "log": lambda z: z,
    "sqrt-log": np.sqrt,
    "loglog": np.log,
    "convergent": lambda z: 1.0 / z,
}


def _fit_growth(z, values):
    z = np.asarray(z, dtype=float)
    y = np.asarray(values, dtype=float)
    residuals, slopes = {}, {}
    for name, phi in _GROWTH_MODELS.items():
        X = np.column_stack([np.ones_like(z), phi(z)])
        coef, *_ = np.linalg.lstsq(X, y, rcond=None)
        residuals[name] = float(np.sqrt(np.mean((X @ coef - y) ** 2)))
        slopes[name] = float(coef[1])
    best = min(residuals, key=residuals.get)
    return best, slopes[best], residuals


def _tail(p, endpoints, toward_zero, rtol):
    vals, total, prev = [], 0.0, 1.0
    for e in endpoints:
        lo, hi = (e, prev) if toward_zero else (prev, e)
        v, *_ = _integrate_inv_g(lo, hi, p, rtol)
        total += v
        vals.append(total)
        prev = e
    z = np.log(1.0 / np.asarray(endpoints)) if toward_zero else np.log(np.asarray(endpoints))
    model, slope, res = _fit_growth(z, vals)
    last_slope = (vals[-1] - vals[-2]) / (z[-1] - z[-2])
    return TailReport(list(map(float, endpoints)), vals, model, slope, res, model != "convergent", float(last_slope))


def h_quadrature(s_hi, s_lo, p: AuxParams, rtol=1e-10, tails=True) -> QuadResult:
    """Integral of 1/g over [s_lo, s_hi] plus growth reports for both tails.

    Lower tail: integral over [eps, 1] for eps = 1e-2 ... 1e-12.
    Upper tail: integral over [1, X] for X = 1e2 ... 1e12.
    """
    if not (0 < s_lo <= s_hi):
        raise DomainError("need 0 < s_lo <= s_hi")
    val, err, ok, msg = _integrate_inv_g(s_lo, s_hi, p, rtol)
    res = QuadResult(val, err, ok, msg)
    if tails:
        res.lower_tail = _tail(p, [10.0**-j for j in range(2, 13, 2)], True, rtol)
        res.upper_tail = _tail(p, [10.0**j for j in range(2, 13, 2)], False, rtol)
    return res
