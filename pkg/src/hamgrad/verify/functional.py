"""Chain-rule gradients of phi(log(M/u)) against finite differences along lines."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..bounds import FunctionalForm, functional_profile, functional_profile_slope, grad_functional
from ..errors import ConfigurationError
from ..solutions import sup_on_cylinder
from .sampling import ball_points


@dataclass
class FunctionalFDReport:
    form: str
    steps: tuple
    max_abs_error: tuple
    max_magnitude_error: tuple
    samples: int

    @property
    def reduction(self):
        e = self.max_abs_error
        return e[0] / e[1] if len(e) > 1 and e[1] > 0 else float("inf")

    def as_dict(self):
        return {"form": self.form, "steps": list(self.steps), "max_abs_error": list(self.max_abs_error),
                "max_magnitude_error": list(self.max_magnitude_error), "reduction": self.reduction,
                "samples": self.samples}


def functional_fd_check(family, form, R, T, k=0.0, steps=(1e-3, 1e-4), *, x0=None, times=None,
                        n_quasi=32, n_line=9, s_floor=1e-2):
    """Compare phi'(s) grad s . e with central differences of phi(s(x + h e)).

    Directions are the coordinate axes and (for dim > 1) a diagonal; the
    magnitude form :func:`grad_functional` is compared along the unit
    gradient direction.  Points outside the form's branch, or with
    s < ``s_floor`` (where the profiles are singular), are skipped.
    """
    form = FunctionalForm(form)
    dim = family.dim
    x0 = np.zeros(dim) if x0 is None else np.asarray(x0, float)
    M = sup_on_cylinder(family, x0, R, T).value
    if not np.isfinite(M):
        raise ConfigurationError("ceiling M is not finite")
    pts = ball_points(dim, x0, R / 2, n_quasi, n_line)
    times = T * np.array([0.25, 0.5, 1.0]) if times is None else np.asarray(times, float)
    dirs = list(np.eye(dim))
    if dim > 1:
        dirs.append(np.ones(dim) / np.sqrt(dim))
    errs = np.zeros(len(steps))
    merrs = np.zeros(len(steps))
    count = 0
    for t in times:
        K = R * np.sqrt(1.0 / t + k)
        u = family.value(pts, t)
        s = np.log(M / u)
        keep = s > s_floor
        if form is FunctionalForm.SMALL_U:
            keep &= u <= M / 2
        elif form is FunctionalForm.LARGE_U:
            keep &= u >= M / 2
        x, u, s = pts[keep], u[keep], s[keep]
        if not len(x):
            continue
        g = family.grad(x, t)
        grad_s = -g / u[:, None]
        slope = functional_profile_slope(form, s, K, signed=True)
        gn = np.linalg.norm(g, axis=-1)
        mag = grad_functional(form, u, gn, M, R, t, k)
        unit = np.where(gn[:, None] > 0, g / np.maximum(gn, 1e-300)[:, None], dirs[0])
        phi = lambda y: functional_profile(form, np.log(M / family.value(y, t)), K)
        for i, h in enumerate(steps):
            for e in dirs:
                chain = slope * (grad_s @ e)
                fd = (phi(x + h * e) - phi(x - h * e)) / (2 * h)
                errs[i] = max(errs[i], float(np.max(np.abs(fd - chain))))
            fdm = np.abs(phi(x + h * unit) - phi(x - h * unit)) / (2 * h)
            merrs[i] = max(merrs[i], float(np.max(np.abs(fdm - mag))))
        count += len(x)
    return FunctionalFDReport(form.value, tuple(steps), tuple(map(float, errs)), tuple(map(float, merrs)), count)
