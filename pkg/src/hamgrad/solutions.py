"""Closed-form positive solutions of the heat equation on model geometries.

Positions are arrays with a trailing coordinate axis of length ``dim``.  For
the hyperbolic kernel the single coordinate is a signed arclength along a
geodesic through the pole, so distances between samples are plain absolute
differences and |grad u| = |u_r|.

Every family exposes ``value``, ``grad``, ``u_t`` and an analytic
``laplacian`` so the heat-equation residual u_t - Laplacian(u) can be checked
independently of the finite-difference solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConsistencyError, DomainError

_SMALL_R = 1e-3


def _pos(x, dim):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x[None]
    if x.shape[-1] != dim:
        if dim == 1:
            x = x[..., None]
        else:
            raise DomainError(f"expected positions with trailing axis {dim}, got shape {x.shape}")
    return x


def _tau(tau):
    tau = np.asarray(tau, dtype=float)
    if np.any(~np.isfinite(tau)) or np.any(tau <= 0):
        raise DomainError("time must be finite and > 0")
    return tau


@dataclass(frozen=True)
class SolutionSample:
    position: np.ndarray
    time: np.ndarray
    u: np.ndarray
    grad: np.ndarray
    u_t: np.ndarray

    @property
    def grad_norm(self):
        return np.linalg.norm(self.grad, axis=-1)


@dataclass(frozen=True)
class CylinderSup:
    """Supremum of a family over B(x0, R) x (tau0, tau0 + T]."""

    value: float
    exact: bool = True
    note: str = ""


class ClosedFormFamily:
    tag: str = ""
    dim: int = 1
    # Ricci lower-bound magnitude of the underlying geometry
    k: float = 0.0

    def value(self, x, tau):
        raise NotImplementedError

    def grad(self, x, tau):
        raise NotImplementedError

    def u_t(self, x, tau):
        raise NotImplementedError

    def laplacian(self, x, tau):
        raise NotImplementedError

    def sup_on_cylinder(self, x0, R, T, tau0=0.0):
        return fallback_sup(self, x0, R, T, tau0)

    def params(self) -> dict:
        return {}

    def describe(self) -> dict:
        return {"family": self.tag, **self.params()}


@dataclass(frozen=True)
class ExpTravel(ClosedFormFamily):
    """u = exp(a x_1 + a^2 tau) on R^n."""

    a: float
    n: int = 1
    tag = "exp"

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError("wavenumber a must be > 0")

    @property
    def dim(self):
        return self.n

    def params(self):
        return {"a": self.a, "n": self.n}

    def value(self, x, tau):
        x = _pos(x, self.n)
        return np.exp(self.a * x[..., 0] + self.a**2 * _tau(tau))

    def grad(self, x, tau):
        x = _pos(x, self.n)
        u = self.value(x, tau)
        g = np.zeros(np.broadcast_shapes(x.shape, np.shape(u) + (self.n,)))
        g[..., 0] = self.a * u
        return g

    def u_t(self, x, tau):
        return self.a**2 * self.value(x, tau)

    def laplacian(self, x, tau):
        return self.a**2 * self.value(x, tau)

    def sup_on_cylinder(self, x0, R, T, tau0=0.0):
        x0 = _pos(x0, self.n)
        if math.isinf(R):
            return CylinderSup(math.inf, True, "exponential family is unbounded on the whole space")
        return CylinderSup(float(np.exp(self.a * (x0[0] + R) + self.a**2 * (tau0 + T))))


def _gauss_sup(n, a, center, x0, R, T, tau0, prefactor):
    # sup of prefactor * sigma^{-n/2} exp(-rho^2 / 4 sigma), sigma = tau + a
    x0 = _pos(x0, n)
    if math.isinf(R):
        rho = 0.0
    else:
        rho = max(float(np.linalg.norm(x0 - center)) - R, 0.0)
    lo, hi = a + tau0, a + tau0 + T
    if lo == 0 and rho == 0:
        return CylinderSup(math.inf, True, "kernel is unbounded as tau -> 0 at its center; pass tau0 > 0")
    sig = min(max(rho**2 / (2.0 * n), lo), hi)
    val = prefactor * sig ** (-n / 2.0) * math.exp(-(rho**2) / (4.0 * sig))
    return CylinderSup(val)


@dataclass(frozen=True)
class _GaussianBase(ClosedFormFamily):
    def _sigma(self, tau):
        raise NotImplementedError

    def _prefactor(self):
        return 1.0

    def _center(self):
        return np.zeros(self.dim)

    def value(self, x, tau):
        x = _pos(x, self.dim)
        sig = self._sigma(tau)
        r2 = np.sum((x - self._center()) ** 2, axis=-1)
        return self._prefactor() * sig ** (-self.dim / 2.0) * np.exp(-r2 / (4.0 * sig))

    def grad(self, x, tau):
        x = _pos(x, self.dim)
        sig = np.asarray(self._sigma(tau))
        u = self.value(x, tau)
        return -(x - self._center()) / (2.0 * sig[..., None]) * u[..., None]

    def u_t(self, x, tau):
        x = _pos(x, self.dim)
        sig = self._sigma(tau)
        r2 = np.sum((x - self._center()) ** 2, axis=-1)
        return (-self.dim / (2.0 * sig) + r2 / (4.0 * sig**2)) * self.value(x, tau)

    def laplacian(self, x, tau):
        x = _pos(x, self.dim)
        sig = self._sigma(tau)
        r2 = np.sum((x - self._center()) ** 2, axis=-1)
        return (r2 / (4.0 * sig**2) - self.dim / (2.0 * sig)) * self.value(x, tau)


@dataclass(frozen=True)
class ShiftedGaussian(_GaussianBase):
    """u = (tau + a)^{-n/2} exp(-|x|^2 / 4(tau + a)) on R^n."""

    a: float
    n: int = 1
    tag = "gauss"

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError("time offset a must be > 0")

    @property
    def dim(self):
        return self.n

    def params(self):
        return {"a": self.a, "n": self.n}

    def _sigma(self, tau):
        return _tau(tau) + self.a

    def sup_on_cylinder(self, x0, R, T, tau0=0.0):
        return _gauss_sup(self.n, self.a, self._center(), x0, R, T, tau0, 1.0)


@dataclass(frozen=True)
class HeatKernelEuclidean(_GaussianBase):
    """u = (4 pi tau)^{-n/2} exp(-|x - y|^2 / 4 tau) on R^n."""

    n: int = 1
    y: tuple = ()
    tag = "kernel"

    def __post_init__(self):
        if self.y == ():
            object.__setattr__(self, "y", (0.0,) * self.n)
        if len(self.y) != self.n:
            raise DomainError("center y must have n coordinates")

    @property
    def dim(self):
        return self.n

    def params(self):
        return {"n": self.n, "y": list(self.y)}

    def _center(self):
        return np.asarray(self.y, dtype=float)

    def _prefactor(self):
        return (4.0 * math.pi) ** (-self.n / 2.0)

    def _sigma(self, tau):
        return _tau(tau)

    def sup_on_cylinder(self, x0, R, T, tau0=0.0):
        return _gauss_sup(self.n, 0.0, self._center(), x0, R, T, tau0, self._prefactor())


def _log_r_over_sinh(r):
    r = np.abs(np.asarray(r, dtype=float))
    small = r < _SMALL_R
    rs = np.where(small, 1.0, r)
    big = np.log(2.0 * rs) - rs - np.log1p(-np.exp(-2.0 * rs))
    return np.where(small, -(r**2) / 6.0 + r**4 / 180.0, big)


def _q_coth(r):
    # (1/r - coth r) / r, regular at 0
    r = np.abs(np.asarray(r, dtype=float))
    small = r < _SMALL_R
    rs = np.where(small, 1.0, r)
    big = (1.0 / rs - 1.0 / np.tanh(rs)) / rs
    return np.where(small, -1.0 / 3.0 + r**2 / 45.0 - 2.0 * r**4 / 945.0, big)


def _r_coth(r):
    r = np.abs(np.asarray(r, dtype=float))
    small = r < _SMALL_R
    rs = np.where(small, 1.0, r)
    return np.where(small, 1.0 + r**2 / 3.0 - r**4 / 45.0, rs / np.tanh(rs))


def _inv_sinh2_minus_inv_r2(r):
    r = np.abs(np.asarray(r, dtype=float))
    small = r < _SMALL_R
    rs = np.where(small, 1.0, r)
    big = 1.0 / np.sinh(rs) ** 2 - 1.0 / rs**2
    return np.where(small, -1.0 / 3.0 + r**2 / 15.0 - 2.0 * r**4 / 189.0, big)


@dataclass(frozen=True)
class HeatKernelH3(ClosedFormFamily):
    """Heat kernel of hyperbolic 3-space (curvature -1) centered at the pole.

    u(r, tau) = (4 pi tau)^{-3/2} (r / sinh r) exp(-tau - r^2 / 4 tau).
    Ricci = -2, so k = 2.
    """

    tag = "h3kernel"
    dim = 1
    k = 2.0

    def _logu(self, r, tau):
        return -1.5 * np.log(4.0 * math.pi * tau) + _log_r_over_sinh(r) - tau - r**2 / (4.0 * tau)

    def _dlogu_dr(self, r, tau):
        # phi_r = 1/r - coth r - r/(2 tau), written as r * (q(r) - 1/(2 tau))
        return r * (_q_coth(r) - 1.0 / (2.0 * tau))

    def value(self, x, tau):
        r = np.abs(_pos(x, 1)[..., 0])
        return np.exp(self._logu(r, _tau(tau)))

    def radial_derivative(self, r, tau):
        r = np.abs(np.asarray(r, dtype=float))
        tau = _tau(tau)
        return self._dlogu_dr(r, tau) * np.exp(self._logu(r, tau))

    def grad(self, x, tau):
        x = _pos(x, 1)
        rho = x[..., 0]
        tau = _tau(tau)
        # d/d(rho) of a radial function: u_r * sign(rho); u_r / r is regular so use rho directly
        g = rho * (_q_coth(rho) - 1.0 / (2.0 * tau)) * np.exp(self._logu(np.abs(rho), tau))
        return g[..., None]

    def u_t(self, x, tau):
        r = np.abs(_pos(x, 1)[..., 0])
        tau = _tau(tau)
        return (-1.5 / tau - 1.0 + r**2 / (4.0 * tau**2)) * np.exp(self._logu(r, tau))

    def laplacian(self, x, tau):
        # u_rr + 2 coth(r) u_r = u (phi_r^2 + phi_rr + 2 coth r phi_r)
        r = np.abs(_pos(x, 1)[..., 0])
        tau = _tau(tau)
        w = _q_coth(r) - 1.0 / (2.0 * tau)
        phi_r = r * w
        phi_rr = _inv_sinh2_minus_inv_r2(r) - 1.0 / (2.0 * tau)
        coth_phi_r = _r_coth(r) * w
        return (phi_r**2 + phi_rr + 2.0 * coth_phi_r) * np.exp(self._logu(r, tau))

    def sup_on_cylinder(self, x0, R, T, tau0=0.0):
        x0 = float(_pos(x0, 1)[0])
        rmin = 0.0 if math.isinf(R) else max(abs(x0) - R, 0.0)
        if tau0 == 0 and rmin == 0:
            return CylinderSup(math.inf, True, "kernel is unbounded as tau -> 0 at its center; pass tau0 > 0")
        tstar = (-6.0 + math.sqrt(36.0 + 16.0 * rmin**2)) / 8.0
        tstar = min(max(tstar, tau0), tau0 + T)
        return CylinderSup(float(np.exp(self._logu(rmin, tstar))))


@dataclass(frozen=True)
class FourierPositive(ClosedFormFamily):
    """u = A + exp(-lam^2 tau) cos(lam x_1), A > 1, on a line or circle."""

    lam: float
    A: float = 2.0
    n: int = 1
    tag = "fourier"

    def __post_init__(self):
        if not self.A > 1:
            raise DomainError("A must be > 1 for positivity")
        if not self.lam > 0:
            raise DomainError("lam must be > 0")

    @property
    def dim(self):
        return self.n

    def params(self):
        return {"lam": self.lam, "A": self.A, "n": self.n}

    def value(self, x, tau):
        x = _pos(x, self.n)
        return self.A + np.exp(-self.lam**2 * _tau(tau)) * np.cos(self.lam * x[..., 0])

    def grad(self, x, tau):
        x = _pos(x, self.n)
        tau = _tau(tau)
        gx = -self.lam * np.exp(-self.lam**2 * tau) * np.sin(self.lam * x[..., 0])
        g = np.zeros(np.broadcast_shapes(x.shape, np.shape(gx) + (self.n,)))
        g[..., 0] = gx
        return g

    def u_t(self, x, tau):
        x = _pos(x, self.n)
        return -self.lam**2 * np.exp(-self.lam**2 * _tau(tau)) * np.cos(self.lam * x[..., 0])

    laplacian = u_t

    def sup_on_cylinder(self, x0, R, T, tau0=0.0):
        x0 = _pos(x0, self.n)
        if math.isinf(R):
            cmax = 1.0
        else:
            lo, hi = x0[0] - R, x0[0] + R
            period = 2.0 * math.pi / self.lam
            cmax = 1.0 if math.floor(hi / period) * period >= lo else max(
                math.cos(self.lam * lo), math.cos(self.lam * hi)
            )
        tau = tau0 if cmax > 0 else tau0 + T
        return CylinderSup(self.A + math.exp(-self.lam**2 * tau) * cmax)


@dataclass(frozen=True)
class TimeShifted(ClosedFormFamily):
    """u(x, tau) = base(x, tau + shift); places a kernel on a cylinder with finite sup."""

    base: ClosedFormFamily
    shift: float

    def __post_init__(self):
        if not self.shift > 0:
            raise DomainError("shift must be > 0")

    @property
    def tag(self):
        return self.base.tag

    @property
    def dim(self):
        return self.base.dim

    @property
    def k(self):
        return self.base.k

    def params(self):
        return {**self.base.params(), "shift": self.shift}

    def value(self, x, tau):
        return self.base.value(x, _tau(tau) + self.shift)

    def grad(self, x, tau):
        return self.base.grad(x, _tau(tau) + self.shift)

    def u_t(self, x, tau):
        return self.base.u_t(x, _tau(tau) + self.shift)

    def laplacian(self, x, tau):
        return self.base.laplacian(x, _tau(tau) + self.shift)

    def radial_derivative(self, r, tau):
        return self.base.radial_derivative(r, _tau(tau) + self.shift)

    def sup_on_cylinder(self, x0, R, T, tau0=0.0):
        return self.base.sup_on_cylinder(x0, R, T, tau0 + self.shift)


@dataclass(frozen=True)
class Scaled(ClosedFormFamily):
    """lam * base: the heat equation is linear."""

    base: ClosedFormFamily
    lam: float

    @property
    def tag(self):
        return self.base.tag

    @property
    def dim(self):
        return self.base.dim

    @property
    def k(self):
        return self.base.k

    def params(self):
        return {**self.base.params(), "scale": self.lam}

    def value(self, x, tau):
        return self.lam * self.base.value(x, tau)

    def grad(self, x, tau):
        return self.lam * self.base.grad(x, tau)

    def u_t(self, x, tau):
        return self.lam * self.base.u_t(x, tau)

    def laplacian(self, x, tau):
        return self.lam * self.base.laplacian(x, tau)

    def sup_on_cylinder(self, x0, R, T, tau0=0.0):
        sup = self.base.sup_on_cylinder(x0, R, T, tau0)
        return CylinderSup(self.lam * sup.value, sup.exact, sup.note)


@dataclass(frozen=True)
class Rescaled(ClosedFormFamily):
    """Parabolic rescaling v(x, tau) = base(x / mu, tau / mu^2) on flat space."""

    base: ClosedFormFamily
    mu: float

    @property
    def tag(self):
        return self.base.tag

    @property
    def dim(self):
        return self.base.dim

    @property
    def k(self):
        return self.base.k

    def params(self):
        return {**self.base.params(), "mu": self.mu}

    def value(self, x, tau):
        return self.base.value(np.asarray(x, dtype=float) / self.mu, _tau(tau) / self.mu**2)

    def grad(self, x, tau):
        return self.base.grad(np.asarray(x, dtype=float) / self.mu, _tau(tau) / self.mu**2) / self.mu

    def u_t(self, x, tau):
        return self.base.u_t(np.asarray(x, dtype=float) / self.mu, _tau(tau) / self.mu**2) / self.mu**2

    def laplacian(self, x, tau):
        return self.base.laplacian(np.asarray(x, dtype=float) / self.mu, _tau(tau) / self.mu**2) / self.mu**2

    def sup_on_cylinder(self, x0, R, T, tau0=0.0):
        x0 = np.asarray(x0, dtype=float)
        return self.base.sup_on_cylinder(x0 / self.mu, R / self.mu, T / self.mu**2, tau0 / self.mu**2)


def fallback_sup(f, x0, R, T, tau0=0.0, n_space=201, n_time=201):
    """Sampled supremum over a line segment through x0 along each axis; approximate."""
    if math.isinf(R):
        return CylinderSup(math.inf, False, "cannot sample an unbounded ball")
    x0 = _pos(x0, f.dim)
    offs = np.linspace(-R, R, n_space)
    pts = [x0 + np.outer(offs, np.eye(f.dim)[j]) for j in range(f.dim)]
    pts = np.concatenate(pts)
    lo = tau0 if tau0 > 0 else T * 1e-6
    taus = np.geomspace(lo, tau0 + T, n_time)
    vals = f.value(pts[:, None, :], taus[None, :])
    return CylinderSup(float(np.max(vals)), False, "sampled on axis lines; approximate")


def evaluate(f: ClosedFormFamily, x, tau) -> SolutionSample:
    x = _pos(x, f.dim)
    tau = _tau(tau)
    return SolutionSample(x, tau, f.value(x, tau), f.grad(x, tau), f.u_t(x, tau))


def sup_on_cylinder(f: ClosedFormFamily, x0, R, T, tau0=0.0) -> CylinderSup:
    if not (R > 0 and T > 0):
        raise DomainError("R and T must be > 0")
    if tau0 < 0:
        raise DomainError("tau0 must be >= 0")
    return f.sup_on_cylinder(x0, R, T, tau0)


def hamilton_point(f: ClosedFormFamily, x, tau, M, rtol=1e-12):
    """(s, lhs) = (log(M/u), |grad u|^2 / u^2) at (x, tau)."""
    u = np.asarray(f.value(x, tau))
    if np.any(u > M * (1.0 + rtol)):
        raise ConsistencyError("u exceeds the ceiling M")
    s = np.maximum(np.log(M / u), 0.0)
    lhs = np.sum((f.grad(x, tau) / u[..., None]) ** 2, axis=-1)
    if s.ndim == 0:
        return float(s), float(lhs)
    return s, lhs


_FAMILIES = {
    "exp": ExpTravel,
    "gauss": ShiftedGaussian,
    "kernel": HeatKernelEuclidean,
    "h3kernel": HeatKernelH3,
    "fourier": FourierPositive,
}


def make_family(tag: str, **params) -> ClosedFormFamily:
    """Build a family from a tag and numeric parameters (used by the CLI)."""
    try:
        cls = _FAMILIES[tag]
    except KeyError:
        raise DomainError(f"unknown family {tag!r}; choose from {sorted(_FAMILIES)}") from None
    shift = params.pop("shift", None)
    if "n" in params:
        params["n"] = int(params["n"])
    if "y" in params and not isinstance(params["y"], tuple):
        params["y"] = tuple(np.atleast_1d(params["y"]).astype(float))
    fam = cls(**params)
    if shift:
        fam = TimeShifted(fam, float(shift))
    return fam
