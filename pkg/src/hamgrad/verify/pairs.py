"""Evaluation sources and pair sets shared by the Harnack and modulus checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError
from ..pde import CIRCLE, RunResult
from ..solutions import ClosedFormFamily, sup_on_cylinder
from .sampling import ball_points, unit_times


@dataclass
class Source:
    """value(x, t) on cylinder time t in (0, T], plus the ceiling M and metric."""

    value: object
    M: float
    dim: int
    times: np.ndarray
    x0: np.ndarray
    periodic: float = 0.0
    description: dict | None = None

    def dist(self, x, y):
        diff = np.asarray(x, float) - np.asarray(y, float)
        if self.periodic:
            L = self.periodic
            diff = (diff + L / 2) % L - L / 2
        return np.linalg.norm(diff, axis=-1)


def family_source(family: ClosedFormFamily, R, T, *, x0=None, tau0=0.0, M=None, n_times=9) -> Source:
    x0 = np.zeros(family.dim) if x0 is None else np.broadcast_to(np.asarray(x0, float), (family.dim,))
    if M is None:
        M = sup_on_cylinder(family, x0, R, T, tau0).value
    if not math.isfinite(M):
        raise ConfigurationError("ceiling M is not finite")
    return Source(lambda x, t: family.value(x, t + tau0), float(M), family.dim,
                  T * unit_times(n_times, 1e-2), x0, 0.0, family.describe())


def run_source(run: RunResult) -> Source:
    """Piecewise-linear interpolation of a radial/interval run at its snapshot times."""
    center, _ = run.meta["ball"]
    t0 = run.meta.get("t0", 0.0)
    grid = run.grid
    snaps = {round(s.time - t0, 12): s.u for s in run.snapshots if s.time - t0 > 0}
    period = grid.geometry.extent if grid.geometry.tag == CIRCLE else 0.0

    def value(x, t):
        u = snaps[round(float(t), 12)]
        r = np.asarray(x, float)[..., 0]
        if grid.geometry.radial:
            r = np.abs(r)
        if period:
            return np.interp(r, grid.nodes, u, period=period)
        return np.interp(r, grid.nodes, u)

    return Source(value, float(run.M), 1, np.array(sorted(snaps)), np.array([float(center)]),
                  period, {"geometry": run.meta["geometry"], "seed": run.meta.get("seed")})


def _directions(dim):
    eye = np.eye(dim)
    dirs = [eye[0], -eye[0]]
    if dim > 1:
        dirs += [eye[1], -eye[1], (eye[0] + eye[1]) / math.sqrt(2.0)]
    return np.array(dirs)


def base_points(src: Source, R, n_quasi=24, n_line=9):
    return ball_points(src.dim, src.x0, R / 2, n_quasi, n_line)


def offsets(src: Source, x, radii, fractions=(0.0, 1e-6, 1e-3, 0.01, 0.1, 0.5, 0.9, 1.0)):
    """y = x + f r e for directions e, per-point radii r and the listed fractions f."""
    dirs = _directions(src.dim)
    f = np.asarray(fractions, float)
    steps = radii[:, None, None] * f[None, :, None]  # (P, F, 1)
    ys = x[:, None, None, :] + steps[:, :, None, :] * dirs[None, None, :, :]
    P = x.shape[0]
    xs = np.broadcast_to(x[:, None, None, :], ys.shape)
    return xs.reshape(-1, src.dim), ys.reshape(-1, src.dim), np.broadcast_to(np.arange(P)[:, None, None], ys.shape[:3]).ravel()


def in_half_ball(src: Source, y, R):
    return src.dist(y, src.x0) <= R / 2 * (1 + 1e-12)
