"""Geometric median estimators.

Two routes to the same target: a one-pass averaged stochastic gradient
recursion for streams, and damped Weiszfeld iterations for in-memory
batches.  The geometric median of a distribution is the minimizer of
``E[|X - u| - |X|]``; for a finite sample that is the classical Fermat
point, the minimizer of the summed Euclidean distances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .linalg import as_vector

_WEISZFELD_CLAMP = 1e-12


@dataclass(frozen=True)
class StepSchedule:
    """Polynomially decaying step sizes gamma_n = c * n**(-alpha).

    The exponent must sit strictly inside (1/2, 1): slow enough decay
    that the iterates keep moving, fast enough that averaging kills the
    noise.  Step indexing starts at n = 1, so the first step is c.
    """

    c: float = 2.0
    alpha: float = 0.75

    def __post_init__(self):
        if not (self.c > 0):
            raise ValueError(f"step constant must be positive, got {self.c}")
        if not (0.5 < self.alpha < 1.0):
            raise ValueError(
                f"step exponent must lie in (0.5, 1), got {self.alpha}"
            )

    def gamma(self, n):
        if n < 1:
            raise ValueError(f"step index must be >= 1, got {n}")
        return self.c * float(n) ** (-self.alpha)


class GeometricMedianSGD:
    """Averaged stochastic gradient iteration for the geometric median.

    The first observation seeds both the iterate and its running average
    without counting as an update.  Each later observation x moves the
    iterate a distance of exactly gamma_n along the unit direction from
    the iterate toward x, then folds the result into the Polyak-Ruppert
    average:

        m <- m + gamma_n * (x - m) / |x - m|
        mbar <- mbar + (m - mbar) / (n + 1)

    An observation that lands exactly on the iterate contributes no move
    but still advances the counter and the average.
    """

    def __init__(self, dim=None, schedule=None, m0=None):
        self.schedule = schedule if schedule is not None else StepSchedule()
        self._dim = None if dim is None else int(dim)
        self._m = None
        self._mbar = None
        self._n = 0
        if m0 is not None:
            m0 = as_vector(m0, dim=self._dim)
            self._dim = m0.shape[0]
            self._m = m0.copy()
            self._mbar = m0.copy()

    @property
    def dim(self):
        return self._dim

    @property
    def n_updates(self):
        """Number of gradient steps taken (the seeding observation is not one)."""
        return self._n

    @property
    def initialized(self):
        return self._m is not None

    @property
    def iterate(self):
        return None if self._m is None else self._m.copy()

    @property
    def estimate(self):
        """Current averaged iterate (the estimator to report)."""
        return None if self._mbar is None else self._mbar.copy()

    def update(self, x):
        x = as_vector(x, dim=self._dim)
        if self._m is None:
            self._dim = x.shape[0]
            self._m = x.copy()
            self._mbar = x.copy()
            return self
        diff = x - self._m
        dist = float(np.linalg.norm(diff))
        if dist > 0.0:
            gamma = self.schedule.gamma(self._n + 1)
            self._m += (gamma / dist) * diff
        self._n += 1
        self._mbar += (self._m - self._mbar) / self._n
        return self

    def update_many(self, xs):
        xs = np.asarray(xs, dtype=np.float64)
        if xs.ndim != 2:
            raise ValueError(f"expected a 2-D sample array, got shape {xs.shape}")
        for row in xs:
            self.update(row)
        return self

    def state_dict(self):
        return {
            "dim": self._dim,
            "n": self._n,
            "c": self.schedule.c,
            "alpha": self.schedule.alpha,
            "m": None if self._m is None else self._m.tolist(),
            "mbar": None if self._mbar is None else self._mbar.tolist(),
        }

    @classmethod
    def from_state_dict(cls, state):
        est = cls(dim=state["dim"], schedule=StepSchedule(state["c"], state["alpha"]))
        if state["m"] is not None:
            est._m = np.asarray(state["m"], dtype=np.float64)
            est._mbar = np.asarray(state["mbar"], dtype=np.float64)
        est._n = int(state["n"])
        return est


def median_objective(points, u):
    """Summed Euclidean distances from ``u`` to the sample points."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise ValueError(f"expected a 2-D sample array, got shape {pts.shape}")
    u = as_vector(u, dim=pts.shape[1])
    return float(np.linalg.norm(pts - u, axis=1).sum())


def weiszfeld_median(points, eps=1e-8, max_iter=1000):
    """Weiszfeld fixed-point iteration for the sample geometric median.

    Starts from the coordinate-wise median and repeats

        x <- sum_i w_i X_i,   w_i = (1/|X_i - x|) / sum_j (1/|X_j - x|)

    with distances clamped below at 1e-12, until the iterate moves by at
    most ``eps``.  Each sweep is a majorize-minimize step, so the
    objective never increases.

    When the iterate sits on a data point (within the clamp) the plain
    weights would pin it there even if it is not the minimizer -- which
    happens immediately for a 3-point set whose coordinate-wise median
    is a vertex.  Those steps use the Vardi-Zhang rule instead: leave
    the anchor only if the unit pull of the other points exceeds the
    anchor's multiplicity, retreating along the plain step accordingly.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError(f"expected a non-empty 2-D sample array, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("sample contains non-finite entries")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    x = np.median(pts, axis=0)
    disp = np.inf
    for _ in range(max_iter):
        diffs = pts - x
        dists = np.linalg.norm(diffs, axis=1)
        anchored = dists <= _WEISZFELD_CLAMP
        if anchored.any():
            free = ~anchored
            if not free.any():
                return x  # every point coincides with the iterate
            inv = 1.0 / dists[free]
            pull = inv @ diffs[free]
            pull_norm = float(np.linalg.norm(pull))
            eta = float(anchored.sum())
            if pull_norm <= eta:
                return x  # the anchor satisfies the optimality condition
            target = (inv / inv.sum()) @ pts[free]
            lam = min(1.0, eta / pull_norm)
            x_new = (1.0 - lam) * target + lam * x
        else:
            w = 1.0 / dists
            w /= w.sum()
            x_new = w @ pts
        disp = float(np.linalg.norm(x_new - x))
        x = x_new
        if disp <= eps:
            return x
    raise ConvergenceError(
        f"Weiszfeld iteration did not converge in {max_iter} sweeps "
        f"(last displacement {disp:.3e})",
        last=x,
        residual=disp,
    )
