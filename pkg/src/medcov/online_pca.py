"""Recursive tracking of the leading eigenvectors of an evolving
symmetric matrix.

A full eigendecomposition per observation would cost O(d^3); the tracker
instead runs one averaged power-type step per observation on q carrier
vectors,

    u_j <- u_j + (1/(n+1)) * (Vbar u_j / |u_j| - u_j),

followed by a deflation pass (sequential Gram-Schmidt, written back into
the carriers) that keeps the q directions from collapsing onto the top
eigenvector.  The carrier u_j converges to lambda_j e_j, so its norm
estimates the eigenvalue and its direction the eigenvector.
"""

from __future__ import annotations

import numpy as np

from .linalg import as_sym_matrix, as_vector

_COLLAPSE_EPS = 1e-12
_DISTINCT_EPS = 1e-10


def pc_scores(x, center, basis):
    """Coordinates of x - center on an orthonormal basis, plus the
    Euclidean distance to the spanned subspace.

    ``basis`` holds the orthonormal vectors as rows.  Returns
    ``(scores, ortho_dist)``; by Pythagoras, ``sum(scores**2) +
    ortho_dist**2 == |x - center|**2``.
    """
    b = np.atleast_2d(np.asarray(basis, dtype=np.float64))
    x = as_vector(x, dim=b.shape[1])
    center = as_vector(center, dim=b.shape[1])
    z = x - center
    scores = b @ z
    resid = z - b.T @ scores
    return scores, float(np.linalg.norm(resid))


class OnlineEigenTracker:
    """Streaming estimator of the top-q eigenpairs of a slowly moving
    symmetric matrix (typically the averaged MCM iterate).

    Warm-up: the tracker buffers the first q centered observations that
    are numerically independent of each other and uses them, orthonormalized,
    as the starting carriers; :meth:`force_ready` fills any remaining
    slots from the seeded RNG when the stream is too short.  After
    warm-up each call to :meth:`step` performs one update against the
    current matrix.

    A carrier whose norm collapses below 1e-12 is replaced by a fresh
    random unit vector orthogonal to the carriers before it; the number
    of such reinitializations is returned by :meth:`step` and tallied in
    :attr:`n_reinits`.
    """

    def __init__(self, dim, q, *, seed=0):
        d = int(dim)
        q = int(q)
        if d < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        if not (1 <= q <= d):
            raise ValueError(f"q must be in [1, {d}], got {q}")
        self._d = d
        self._q = q
        self._seed = int(seed)
        self._raw = None
        self._warmup = []  # orthonormal units accumulated before start
        self._n = 0
        self._rng_draws = 0
        self._reinits = 0

    @property
    def dim(self):
        return self._d

    @property
    def q(self):
        return self._q

    @property
    def ready(self):
        return self._raw is not None

    @property
    def n_steps(self):
        return self._n

    @property
    def n_reinits(self):
        return self._reinits

    def _fresh_unit(self, prefix):
        """Random unit vector orthogonal to the given rows, drawn from a
        counter-indexed Philox stream so replay is deterministic."""
        while True:
            seq = np.random.SeedSequence([self._seed, self._rng_draws])
            self._rng_draws += 1
            rng = np.random.Generator(np.random.Philox(seq))
            v = rng.standard_normal(self._d)
            for row in prefix:
                v -= (row @ v) / (row @ row) * row
            norm = float(np.linalg.norm(v))
            if norm > 1e-6:
                return v / norm

    def offer(self, centered_x):
        """Feed one centered observation to the warm-up buffer.

        Returns True once the tracker has become ready.  Observations
        that are numerically dependent on the buffered ones are ignored.
        """
        if self.ready:
            raise RuntimeError("tracker is already initialized")
        v = as_vector(centered_x, dim=self._d).copy()
        for row in self._warmup:
            v -= (row @ v) * row
        norm = float(np.linalg.norm(v))
        if norm > _DISTINCT_EPS:
            self._warmup.append(v / norm)
            if len(self._warmup) == self._q:
                self._start()
        return self.ready

    def force_ready(self):
        """Complete the warm-up immediately, filling any open carrier
        slots with seeded random units orthogonal to the buffered ones."""
        if self.ready:
            return self
        while len(self._warmup) < self._q:
            self._warmup.append(self._fresh_unit(self._warmup))
        self._start()
        return self

    def _start(self):
        self._raw = np.array(self._warmup, dtype=np.float64)
        self._warmup = []

    def step(self, v_bar):
        """One tracking update against the current matrix.

        Returns the number of carriers that collapsed and were
        reinitialized during this update (normally 0).
        """
        if not self.ready:
            raise RuntimeError("tracker not initialized: warm-up incomplete")
        v_bar = as_sym_matrix(v_bar, dim=self._d)
        r = self._raw
        reinits = 0
        norms = np.linalg.norm(r, axis=1)
        for j in range(self._q):
            if norms[j] < _COLLAPSE_EPS:
                r[j] = self._fresh_unit(r[:j])
                norms[j] = 1.0
                reinits += 1
        g = 1.0 / (self._n + 1)
        w = r / norms[:, None]  # pre-step normalized carriers
        r *= 1.0 - g
        r += g * (w @ v_bar)
        # deflation: orthogonalize each carrier against the ones before
        # it, writing the residual back so norms keep tracking lambda_j
        for j in range(self._q):
            for i in range(j):
                u = r[i]
                r[j] -= (u @ r[j]) / (u @ u) * u
            if float(np.linalg.norm(r[j])) < _COLLAPSE_EPS:
                r[j] = self._fresh_unit(r[:j])
                reinits += 1
        norms = np.linalg.norm(r, axis=1)
        order = np.argsort(-norms, kind="stable")
        self._raw = r[order]
        self._n += 1
        self._reinits += reinits
        return reinits

    @property
    def raw(self):
        """Unnormalized carriers (rows); row j converges to lambda_j e_j."""
        if not self.ready:
            raise RuntimeError("tracker not initialized")
        return self._raw.copy()

    @property
    def eigenvalues(self):
        """Eigenvalue estimates: carrier norms, non-increasing."""
        if not self.ready:
            raise RuntimeError("tracker not initialized")
        return np.linalg.norm(self._raw, axis=1)

    @property
    def basis(self):
        """Orthonormal eigenvector estimates as rows (q, d)."""
        if not self.ready:
            raise RuntimeError("tracker not initialized")
        norms = np.linalg.norm(self._raw, axis=1)
        return self._raw / norms[:, None]

    def projector(self):
        b = self.basis
        return b.T @ b

    def scores(self, x, center):
        return pc_scores(x, center, self.basis)

    def state_dict(self):
        return {
            "dim": self._d,
            "q": self._q,
            "seed": self._seed,
            "n": self._n,
            "rng_draws": self._rng_draws,
            "reinits": self._reinits,
            "raw": None if self._raw is None else self._raw.tolist(),
            "warmup": [u.tolist() for u in self._warmup],
        }

    @classmethod
    def from_state_dict(cls, state):
        tracker = cls(state["dim"], state["q"], seed=state["seed"])
        tracker._n = int(state["n"])
        tracker._rng_draws = int(state["rng_draws"])
        tracker._reinits = int(state["reinits"])
        if state["raw"] is not None:
            tracker._raw = np.asarray(state["raw"], dtype=np.float64)
        tracker._warmup = [np.asarray(u, dtype=np.float64) for u in state["warmup"]]
        return tracker
