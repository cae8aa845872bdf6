"""Median covariation matrix (MCM) estimators.

The MCM of a random vector X with geometric median m is the geometric
median, under the Frobenius norm, of the rank-one matrices
``(X - m)(X - m)^T``.  Like the covariance matrix it is symmetric and
shares eigenvectors with the covariance under symmetric distributions,
but it is far less sensitive to heavy tails and contamination.

This module provides a one-pass averaged stochastic gradient estimator
(optionally estimating the median jointly) and a batch Weiszfeld
fixed-point baseline.
"""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError
from .geomedian import GeometricMedianSGD, StepSchedule
from .linalg import as_sym_matrix, as_vector

_WEISZFELD_CLAMP = 1e-12
# Entries above this trigger the rescaled update path; keeps every
# intermediate product (including squared squared-norms) inside float64.
_HUGE_ENTRY = 1e70
# Recompute the cached squared Frobenius norm exactly every so often so
# incremental-update roundoff cannot accumulate over long streams.
_FRO2_REFRESH = 4096


class MedianCovariationSGD:
    """One-pass averaged stochastic gradient estimator of the MCM.

    Each observation x is centered at the current averaged median
    estimate (or at a fixed, known median), turned into the implicit
    rank-one target Y = c c^T with c = x - center, and the iterate moves
    a Frobenius distance of exactly gamma_n toward Y:

        V <- V + gamma_n * (Y - V) / |Y - V|_F
        Vbar <- Vbar + (V - Vbar) / (n + 1)

    With ``psd_mode`` the step is clipped at the distance to Y
    (gamma_pos = min(gamma_n, |Y - V|_F)), which makes each update a
    convex combination of V and the PSD matrix Y; starting from V_0 = 0
    every iterate and average then stays PSD.

    In joint mode the first observation only seeds the internal median
    recursion; every later observation advances the median and the
    matrix recursion together, with the centering done at the median
    average from *before* that observation's median update.

    The rank-one target is never materialized against the iterate: the
    Frobenius distance comes from the identity

        |c c^T - V|_F^2 = |c|^4 - 2 c^T V c + |V|_F^2

    and the squared norm |V|_F^2 is carried incrementally, so one update
    costs O(d^2).
    """

    def __init__(self, dim, *, median_schedule=None, cov_schedule=None,
                 psd_mode=True, known_median=None, v0=None):
        d = int(dim)
        if d < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        self._d = d
        self.psd_mode = bool(psd_mode)
        self.cov_schedule = cov_schedule if cov_schedule is not None else StepSchedule()
        if known_median is not None:
            self._known_m = as_vector(known_median, dim=d).copy()
            self._median = None
        else:
            self._known_m = None
            self._median = GeometricMedianSGD(dim=d, schedule=median_schedule)
        if v0 is None:
            v = np.zeros((d, d))
        else:
            v = as_sym_matrix(v0, dim=d)
        self._v = v.copy()
        self._vbar = v.copy()
        self._fro2 = float(np.tensordot(self._v, self._v))
        self._n = 0
        # scratch buffers so the hot loop never allocates
        self._c = np.empty(d)
        self._vc = np.empty(d)
        self._buf = np.empty((d, d))

    @property
    def dim(self):
        return self._d

    @property
    def n_updates(self):
        """Number of matrix updates taken so far."""
        return self._n

    @property
    def joint(self):
        return self._median is not None

    @property
    def iterate(self):
        return self._v.copy()

    @property
    def estimate(self):
        """Averaged iterate Vbar: the matrix estimate to report."""
        if self._n == 0:
            raise ValueError("no observations: the estimator has taken no matrix update yet")
        return self._vbar.copy()

    @property
    def median_iterate(self):
        if self._median is not None:
            return self._median.iterate
        return self._known_m.copy()

    @property
    def median_estimate(self):
        """Center used for the next observation (averaged median or the known one)."""
        if self._median is not None:
            return self._median.estimate
        return self._known_m.copy()

    def update(self, x):
        x = as_vector(x, dim=self._d)
        c = self._c
        if self._median is not None:
            if not self._median.initialized:
                self._median.update(x)
                return self
            np.subtract(x, self._median._mbar, out=c)
            self._median.update(x)
        else:
            np.subtract(x, self._known_m, out=c)

        gamma = self.cov_schedule.gamma(self._n + 1)
        mx = float(np.abs(c).max()) if self._d else 0.0
        if mx > _HUGE_ENTRY:
            self._huge_step(gamma, mx)
        else:
            self._plain_step(gamma)
        self._n += 1
        np.subtract(self._v, self._vbar, out=self._buf)
        self._buf /= self._n
        self._vbar += self._buf
        if self._n % _FRO2_REFRESH == 0:
            self._fro2 = float(np.tensordot(self._v, self._v))
        return self

    def _plain_step(self, gamma):
        c = self._c
        np.dot(self._v, c, out=self._vc)
        cvc = float(c @ self._vc)
        s = float(c @ c)
        dist2 = s * s - 2.0 * cvc + self._fro2
        dist = float(np.sqrt(dist2)) if dist2 > 0.0 else 0.0
        if dist == 0.0:
            return  # observation's target coincides with the iterate
        geff = min(gamma, dist) if self.psd_mode else gamma
        t = geff / dist
        omt = 1.0 - t
        np.outer(c, c, out=self._buf)
        self._v *= omt
        self._buf *= t
        self._v += self._buf
        self._fro2 = omt * omt * self._fro2 + 2.0 * t * omt * cvc + t * t * s * s

    def _huge_step(self, gamma, mx):
        # Same update written in terms of u = c / mx so that no product
        # overflows: |Y - V|_F = mx^2 * D with
        # D = sqrt(|u|^4 - 2 u^T V u / mx^2 + |V|_F^2 / mx^4) ~ |u|^2 >= 1.
        c = self._c
        c /= mx
        np.dot(self._v, c, out=self._vc)
        uvu = float(c @ self._vc)
        su = float(c @ c)
        m2 = mx * mx  # may round to inf; only ever divides
        inner = su * su - 2.0 * (uvu / m2) + (self._fro2 / m2) / m2
        dmat = float(np.sqrt(max(inner, 0.0)))
        if dmat == 0.0:  # only reachable if the iterate itself is astronomical
            return
        # the distance mx^2 * dmat >= mx^2 / 2 dwarfs any step size, so
        # the PSD clip never binds here
        t_shrink = gamma / (m2 * dmat)  # underflows to 0 harmlessly
        t_gain = gamma / dmat
        omt = 1.0 - t_shrink
        np.outer(c, c, out=self._buf)
        self._v *= omt
        self._buf *= t_gain
        self._v += self._buf
        self._fro2 = (omt * omt * self._fro2
                      + 2.0 * t_gain * omt * uvu
                      + t_gain * t_gain * su * su)

    def update_many(self, xs):
        xs = np.asarray(xs, dtype=np.float64)
        if xs.ndim != 2:
            raise ValueError(f"expected a 2-D sample array, got shape {xs.shape}")
        for row in xs:
            self.update(row)
        return self

    def state_dict(self):
        state = {
            "dim": self._d,
            "psd_mode": self.psd_mode,
            "cov_c": self.cov_schedule.c,
            "cov_alpha": self.cov_schedule.alpha,
            "n": self._n,
            "fro2": self._fro2,
            "v": self._v.tolist(),
            "vbar": self._vbar.tolist(),
        }
        if self._median is not None:
            state["mode"] = "joint"
            state["median"] = self._median.state_dict()
        else:
            state["mode"] = "known"
            state["known_median"] = self._known_m.tolist()
        return state

    @classmethod
    def from_state_dict(cls, state):
        schedule = StepSchedule(state["cov_c"], state["cov_alpha"])
        known = state.get("known_median") if state["mode"] == "known" else None
        est = cls(state["dim"], cov_schedule=schedule,
                  psd_mode=state["psd_mode"], known_median=known)
        if state["mode"] == "joint":
            est._median = GeometricMedianSGD.from_state_dict(state["median"])
        est._v = np.asarray(state["v"], dtype=np.float64)
        est._vbar = np.asarray(state["vbar"], dtype=np.float64)
        est._fro2 = float(state["fro2"])
        est._n = int(state["n"])
        return est


def _centered(points, m_hat):
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError(f"expected a non-empty 2-D sample array, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("sample contains non-finite entries")
    m = as_vector(m_hat, dim=pts.shape[1])
    return pts - m


def _rank_one_distances(c, s, v, fro2):
    """Frobenius distances |c_i c_i^T - V|_F for all rows at once."""
    q = np.einsum("ij,ij->i", c @ v, c)
    d2 = s * s - 2.0 * q + fro2
    return np.sqrt(np.maximum(d2, 0.0))


def mcm_objective(points, m_hat, v):
    """Empirical MCM objective sum_i (|Y_i - V|_F - |Y_i|_F) with
    Y_i = (X_i - m)(X_i - m)^T.

    The subtraction of |Y_i|_F keeps the population version finite for
    heavy-tailed laws; it is a constant shift for fixed data, so the
    minimizer is the sample MCM either way.  Note |Y_i|_F = |X_i - m|^2.
    """
    c = _centered(points, m_hat)
    v = as_sym_matrix(v, dim=c.shape[1])
    s = np.einsum("ij,ij->i", c, c)
    fro2 = float(np.tensordot(v, v))
    return float((_rank_one_distances(c, s, v, fro2) - s).sum())


def weiszfeld_mcm(points, m_hat, eps=1e-8, max_iter=1000):
    """Weiszfeld fixed-point iteration for the sample MCM.

    Works on the centered rank-one matrices Y_i = (X_i - m)(X_i - m)^T
    with Frobenius geometry; never materializes the Y_i against the
    iterate thanks to the rank-one distance identity.  Starts from the
    entrywise median of the Y_i, clamps inverse distances at 1e-12, and
    stops when the iterate moves by at most ``eps`` in Frobenius norm.

    Note: the starting point briefly materializes the (n, d, d) stack of
    rank-one matrices, so memory is O(n d^2).
    """
    c = _centered(points, m_hat)
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    s = np.einsum("ij,ij->i", c, c)
    outers = c[:, :, None] * c[:, None, :]
    g = np.median(outers, axis=0)
    del outers
    g = (g + g.T) / 2.0
    disp = np.inf
    for _ in range(max_iter):
        fro2 = float(np.tensordot(g, g))
        dists = _rank_one_distances(c, s, g, fro2)
        anchored = dists <= _WEISZFELD_CLAMP
        if anchored.any():
            # iterate sits on a data matrix: Vardi-Zhang anchor rule,
            # same logic as the vector Weiszfeld
            free = ~anchored
            if not free.any():
                return g
            inv = 1.0 / dists[free]
            cf = c[free]
            pull = (cf * inv[:, None]).T @ cf - float(inv.sum()) * g
            pull_norm = float(np.linalg.norm(pull))
            eta = float(anchored.sum())
            if pull_norm <= eta:
                return g
            wf = inv / inv.sum()
            target = (cf * wf[:, None]).T @ cf
            lam = min(1.0, eta / pull_norm)
            g_new = (1.0 - lam) * target + lam * g
        else:
            w = 1.0 / dists
            w /= w.sum()
            g_new = (c * w[:, None]).T @ c
        g_new = (g_new + g_new.T) / 2.0
        disp = float(np.linalg.norm(g_new - g))
        g = g_new
        if disp <= eps:
            return g
    raise ConvergenceError(
        f"Weiszfeld iteration did not converge in {max_iter} sweeps "
        f"(last displacement {disp:.3e})",
        last=g,
        residual=disp,
    )
