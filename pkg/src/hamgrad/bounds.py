"""Closed-form gradient bounds, Harnack parameters and moduli of continuity.

Every function here is "constant free": dimensional constants are explicit
arguments (``C``) or are simply left out, so callers can estimate them
empirically.  Functions accept scalars or numpy arrays and broadcast; scalar
inputs give Python floats back.

``R = math.inf`` is the global (whole-manifold) case and contributes
``1/R**2 = 0``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError, SingularInputError

INF = math.inf


def _ret(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def inv_sq(R):
    """1/R**2 with 1/inf**2 = 0."""
    R = np.asarray(R, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(np.isinf(R), 0.0, 1.0 / R**2)


def _check_time(t):
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)) or np.any(t <= 0):
        raise DomainError("time must be finite and > 0")
    return t


def _check_s(s):
    s = np.asarray(s, dtype=float)
    if np.any(np.isnan(s)) or np.any(s < 0):
        raise DomainError("log-ratio s must be >= 0")
    return s


def _check_R(R):
    R = np.asarray(R, dtype=float)
    if np.any(np.isnan(R)) or np.any(R <= 0):
        raise DomainError("radius must be > 0 (inf allowed)")
    return R


@dataclass(frozen=True)
class BoundEnv:
    """Cylinder parameters a bound is evaluated against."""

    n: int
    k: float
    R: float
    T: float
    M: float | None = None  # None: take the supremum from the source

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"dimension must be an integer >= 1, got {self.n}")
        if not self.k >= 0:
            raise DomainError(f"k must be >= 0, got {self.k}")
        if not self.R > 0:
            raise DomainError(f"R must be > 0, got {self.R}")
        if not (self.T > 0 and math.isfinite(self.T)):
            raise DomainError(f"T must be finite and > 0, got {self.T}")
        if self.M is not None and not self.M > 0:
            raise DomainError(f"M must be > 0, got {self.M}")

    def with_M(self, M: float) -> "BoundEnv":
        return BoundEnv(self.n, self.k, self.R, self.T, M)


@dataclass(frozen=True)
class HamiltonQuery:
    s: float
    t: float
    R: float = INF

    def __post_init__(self):
        _check_s(self.s)
        _check_time(self.t)
        _check_R(self.R)


class BoundKind(str, enum.Enum):
    CHENG_YAU = "cheng-yau"
    HAMILTON_CLASSIC = "hamilton"
    LI_YAU = "li-yau"
    SZ2006 = "sz2006"
    DN = "dn"
    H0 = "h0"
    H1_GLOBAL = "h1"
    LOWER_ENVELOPE = "lower"
    LOWER_GLOBAL = "lower-global"
    KERNEL_LOG_GRAD = "kernel"


def h0(s, t, R=INF, k=0.0):
    """The sharp localized bound H0(s, t, R) with curvature k folded in.

    Two branches split at s = 1/2, taken verbatim (the function jumps there);
    H0(0) = 0 by continuity.
    """
    s = _check_s(s)
    t = _check_time(t)
    R = _check_R(R)
    invR2 = inv_sq(R)
    B = 1.0 / t + k
    with np.errstate(divide="ignore", invalid="ignore"):
        L = np.abs(np.log(np.where(s > 0, s, 1.0)))
        small = (L**2 * invR2 + B * L) * s**2
        large = s**2 * invR2 + B * s
    out = np.where(s > 0.5, large, np.where(s > 0, small, 0.0))
    return _ret(out)


def H1(s):
    """Profile H1(s): s^2 |log s| for s <= 1/2, s above; H1(0) = 0."""
    s = _check_s(s)
    with np.errstate(divide="ignore", invalid="ignore"):
        small = s**2 * np.abs(np.log(np.where(s > 0, s, 1.0)))
    return _ret(np.where(s > 0.5, s, np.where(s > 0, small, 0.0)))


def h1_global(s, t, k=0.0):
    """Global bound (1/t + k) H1(s)."""
    t = _check_time(t)
    return _ret((1.0 / t + k) * np.asarray(H1(s)))


def legacy_bound(kind, s, t, R=INF, k=0.0, *, s_bar=None, alpha=None):
    """Right-hand side of one of the classical estimates, without its constant.

    DN carries the corrected ``+1``: ((1 + s_bar)/R^2 + 1/t + k) s.
    """
    kind = BoundKind(kind)
    s = _check_s(s)
    t = _check_time(t)
    R = _check_R(R)
    invR2 = inv_sq(R)
    if kind is BoundKind.CHENG_YAU:
        out = invR2 + k + 0.0 * s * t
    elif kind is BoundKind.HAMILTON_CLASSIC:
        out = (1.0 / t + 2.0 * k) * s
    elif kind is BoundKind.LI_YAU:
        if alpha is None:
            raise ConfigurationError("Li-Yau bound needs alpha")
        if not alpha >= 1:
            raise DomainError("alpha must be >= 1")
        out = invR2 + 1.0 / t + k + 0.0 * s
    elif kind is BoundKind.SZ2006:
        out = (invR2 + 1.0 / t + k) * (1.0 + s**2)
    elif kind is BoundKind.DN:
        if s_bar is None:
            raise ConfigurationError("DN bound needs s_bar = log(M/m)")
        s_bar = np.asarray(s_bar, dtype=float)
        if np.any(s_bar < s - 1e-12 * np.maximum(1.0, s)):
            raise DomainError("s_bar must be >= s")
        out = ((1.0 + s_bar) * invR2 + 1.0 / t + k) * s
    else:
        raise ConfigurationError(f"{kind.value} is not a classical bound")
    return _ret(out)


def lower_envelope(s, t, R=INF):
    """Lower envelope (1/R^2 + 1/(t(s+1))) s^2; the R = inf case reduces to s^2/(t(s+1))."""
    s = _check_s(s)
    t = _check_time(t)
    R = _check_R(R)
    return _ret((inv_sq(R) + 1.0 / (t * (s + 1.0))) * s**2)


def kernel_log_grad_bound(d, t, C=1.0):
    """(C/t)(1 + d^2/t)."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise DomainError("distance must be >= 0")
    t = _check_time(t)
    return _ret(C / t * (1.0 + d**2 / t))


def evaluate_bound(kind, s, t, R=INF, k=0.0, *, s_bar=None, alpha=None, d=None, C=1.0):
    """Dispatch on ``kind`` to the matching formula."""
    kind = BoundKind(kind)
    if kind is BoundKind.H0:
        return h0(s, t, R, k)
    if kind is BoundKind.H1_GLOBAL:
        return h1_global(s, t, k)
    if kind in (BoundKind.LOWER_ENVELOPE, BoundKind.LOWER_GLOBAL):
        return lower_envelope(s, t, INF if kind is BoundKind.LOWER_GLOBAL else R)
    if kind is BoundKind.KERNEL_LOG_GRAD:
        if d is None:
            raise ConfigurationError("kernel bound needs the distance d")
        return kernel_log_grad_bound(d, t, C)
    return legacy_bound(kind, s, t, R, k, s_bar=s_bar, alpha=alpha)


def pseudo_harnack(d, R, t, k=0.0, C=1.0):
    """Exponent theta and multiplier L of the same-time pseudo-Harnack inequality.

    Returns ``(theta, L)`` with theta = 1/(1 + C d/R) and
    L = 2 exp(C R^2 (1/t + k)).
    """
    d = np.asarray(d, dtype=float)
    t = _check_time(t)
    if not (C > 0):
        raise DomainError("C must be > 0")
    if not (0 < R < INF):
        raise DomainError("R must be finite and > 0")
    if np.any(d < 0) or np.any(d > R):
        raise DomainError("distance must lie in [0, R]")
    theta = 1.0 / (1.0 + C * d / R)
    with np.errstate(over="ignore"):
        L = 2.0 * np.exp(C * R**2 * (1.0 / t + k)) + 0.0 * d
    return _ret(theta), _ret(L)


def _psi_small(d, xi, R, B, C):
    # xi = M/u >= 2
    return np.expm1(C * d * R * B + (C * d / R) * np.log(xi))


def _psi_large(d, xi, R, B, C):
    # xi = log(M/u) in [0, log 2]
    with np.errstate(divide="ignore"):
        p = np.where(xi > 0, xi ** (1.0 / (1.0 + C * d / R)), 0.0)
    # at u = M (xi = 0) the exponent is 0 even when exp(C d R B) overflows
    return np.where(xi > 0, np.expm1(np.exp(C * d * R * B) * p - xi), 0.0)


def modulus_psi(d, u_val, M, R, t, k=0.0, C=1.0):
    """Modulus of continuity psi(d) around a point where u = ``u_val``.

    The branch is picked by u_val <= M/2 or >= M/2; exactly at M/2 both are
    evaluated and the larger value is returned.
    """
    d = np.asarray(d, dtype=float)
    u_val = np.asarray(u_val, dtype=float)
    t = _check_time(t)
    if np.any(u_val <= 0) or np.any(u_val > M):
        raise DomainError("u_val must lie in (0, M]")
    if np.any(d < 0):
        raise DomainError("distance must be >= 0")
    B = 1.0 / t + k
    half = 0.5 * M
    # overflow to +inf is a (trivially valid) infinite modulus
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        small = _psi_small(d, M / u_val, R, B, C)
        large = _psi_large(d, np.log(M / u_val), R, B, C)
    out = np.where(u_val < half, small, np.where(u_val > half, large, np.maximum(small, large)))
    out = np.where(d == 0, 0.0, out)
    return _ret(out)


def modulus_radius(u_val, M, R, t, k=0.0, c=1.0):
    """Admissible pair distance c R / (R^2 (1/t + k) + |log xi|) for the modulus bound.

    xi is M/u_val (u_val <= M/2) or log(M/u_val) (u_val >= M/2); at M/2 the
    smaller radius is returned.  At u_val = M the radius is 0.
    """
    u_val = np.asarray(u_val, dtype=float)
    t = _check_time(t)
    if np.any(u_val <= 0) or np.any(u_val > M):
        raise DomainError("u_val must lie in (0, M]")
    A = R**2 * (1.0 / t + k)
    with np.errstate(divide="ignore"):
        s = np.log(M / u_val)
        r_small = c * R / (A + np.abs(np.log(M / u_val)))
        r_large = c * R / (A + np.abs(np.log(np.where(s > 0, s, 1.0))))
    r_large = np.where(s > 0, r_large, 0.0)
    half = 0.5 * M
    out = np.where(u_val < half, r_small, np.where(u_val > half, r_large, np.minimum(r_small, r_large)))
    return _ret(out)


class FunctionalForm(str, enum.Enum):
    SMALL_U = "small"
    LARGE_U = "large"
    GLOBAL = "global"


def functional_profile(form, s, K):
    """The scalar map phi(s) whose composition with s = log(M/u) has bounded gradient.

    SMALL_U: log(sqrt(s) + K); LARGE_U: log(sqrt(|log s|) + K);
    GLOBAL: log(sqrt(s + log(1 + 1/s)) + K).
    """
    form = FunctionalForm(form)
    s = np.asarray(s, dtype=float)
    if form is FunctionalForm.SMALL_U:
        out = np.log(np.sqrt(s) + K)
    elif form is FunctionalForm.LARGE_U:
        out = np.log(np.sqrt(np.abs(np.log(s))) + K)
    else:
        out = np.log(np.sqrt(s + np.log1p(1.0 / s)) + K)
    return _ret(out)


def functional_profile_slope(form, s, K, signed=False):
    """|phi'(s)| in closed form, or phi'(s) itself with ``signed=True``."""
    form = FunctionalForm(form)
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise SingularInputError("the functional forms are singular at s = 0")
    if form is FunctionalForm.SMALL_U:
        rs = np.sqrt(s)
        out = 1.0 / (2.0 * rs * (rs + K))
    elif form is FunctionalForm.LARGE_U:
        ls = np.abs(np.log(s))
        if np.any(ls == 0):
            raise SingularInputError("the large-u form is singular at s = 1")
        rl = np.sqrt(ls)
        out = 1.0 / (2.0 * s * rl * (rl + K))
        if signed:
            out = out * np.sign(np.log(s))
    else:
        q = np.sqrt(s + np.log1p(1.0 / s))
        num = 1.0 - 1.0 / (s * (s + 1.0))
        out = (num if signed else np.abs(num)) / (2.0 * q * (q + K))
    return _ret(out)


def grad_functional(form, u_val, grad_norm, M, R, t, k=0.0):
    """Gradient magnitude of phi(log(M/u)) given |grad u| at a point.

    Chain rule: |grad s| = |grad u|/u, so the result is |phi'(s)| |grad u|/u,
    with K = R sqrt(1/t + k).
    """
    form = FunctionalForm(form)
    u_val = np.asarray(u_val, dtype=float)
    grad_norm = np.asarray(grad_norm, dtype=float)
    t = _check_time(t)
    if not (0 < R < INF):
        raise DomainError("the functional forms need a finite R")
    if np.any(u_val <= 0) or np.any(u_val > M):
        raise DomainError("u_val must lie in (0, M]")
    if np.any(grad_norm < 0):
        raise DomainError("grad_norm must be >= 0")
    if form is FunctionalForm.SMALL_U and np.any(u_val > 0.5 * M):
        raise DomainError("small-u form requires u <= M/2")
    if form is FunctionalForm.LARGE_U and np.any(u_val < 0.5 * M):
        raise DomainError("large-u form requires u >= M/2")
    s = np.log(M / u_val)
    K = R * np.sqrt(1.0 / t + k)
    return _ret(functional_profile_slope(form, s, K) * grad_norm / u_val)
