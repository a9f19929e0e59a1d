"""Deterministic sample sets for cylinder scans.

Point sets are built as ``center + radius * unit_points`` and time sets as
``T * unit_times`` so that exact power-of-two rescalings map sample sets onto
each other bit for bit.
"""

from __future__ import annotations

import numpy as np
from scipy.stats import qmc


def unit_ball_points(dim, n_quasi=256, n_line=65):
    """Closed unit ball: a diameter along e1 (endpoints included) plus Sobol points."""
    line = np.zeros((n_line, dim))
    line[:, 0] = np.linspace(-1.0, 1.0, n_line)
    if dim == 1:
        extra = np.linspace(-1.0, 1.0, 2 * n_quasi + 1)[:, None]
        pts = np.vstack([line, extra])
    else:
        m = int(np.ceil(np.log2(max(n_quasi, 2) * 2.0 ** dim)))
        cube = qmc.Sobol(dim, scramble=False).random_base2(m) * 2.0 - 1.0
        inside = cube[np.sum(cube**2, axis=1) <= 1.0][:n_quasi]
        pts = np.vstack([line, inside])
    return np.unique(pts, axis=0)


def ball_points(dim, center, radius, n_quasi=256, n_line=65):
    c = np.broadcast_to(np.asarray(center, dtype=float), (dim,))
    return c + radius * unit_ball_points(dim, n_quasi, n_line)


def unit_times(n=33, first=1e-3):
    """Log-spaced fractions of the horizon ending exactly at 1."""
    t = np.geomspace(first, 1.0, n)
    t[-1] = 1.0
    return t


def pair_indices(n_points, max_pairs=None):
    """Index pairs (i, j), i != j, in row-major order."""
    i, j = np.meshgrid(np.arange(n_points), np.arange(n_points), indexing="ij")
    keep = i != j
    i, j = i[keep], j[keep]
    if max_pairs is not None and len(i) > max_pairs:
        sel = np.linspace(0, len(i) - 1, max_pairs).astype(int)
        i, j = i[sel], j[sel]
    return i, j
