"""Scoring: eigenspace distance between projectors and Monte Carlo
summary statistics."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import NumericalError
from .linalg import as_sym_matrix

_PROJ_TOL = 1e-6


class SummaryStats(NamedTuple):
    median: float
    q1: float
    q3: float
    mean: float


def _check_projector(p, name):
    p = as_sym_matrix(p, tol=_PROJ_TOL)
    gap = float(np.abs(p @ p - p).max())
    if gap > _PROJ_TOL:
        raise ValueError(
            f"{name} is not idempotent within {_PROJ_TOL:g} (max |P^2 - P| = {gap:.3e})"
        )
    tr = float(np.trace(p))
    q = round(tr)
    if abs(tr - q) > _PROJ_TOL:
        raise ValueError(
            f"{name} trace {tr!r} is not an integer within {_PROJ_TOL:g}"
        )
    return p, q


def eigenspace_error(p_hat, p_true):
    """Squared Frobenius distance between two orthogonal projectors of
    equal rank q: tr[(P_hat - P)^T (P_hat - P)] = 2q - 2 tr(P_hat P).

    Bounded by 2q, reaching it exactly when the subspaces are
    orthogonal.  Both formulas are evaluated and cross-checked.
    """
    p_hat, q_hat = _check_projector(p_hat, "p_hat")
    p_true, q_true = _check_projector(p_true, "p_true")
    if p_hat.shape != p_true.shape:
        raise ValueError(f"shape mismatch: {p_hat.shape} vs {p_true.shape}")
    if q_hat != q_true:
        raise ValueError(f"projector ranks differ: {q_hat} vs {q_true}")
    diff = p_hat - p_true
    direct = float(np.tensordot(diff, diff))
    via_trace = 2.0 * q_hat - 2.0 * float(np.tensordot(p_hat, p_true))
    if abs(direct - via_trace) > 1e-8:
        raise NumericalError(
            f"eigenspace-error cross-check failed: {direct!r} vs {via_trace!r}"
        )
    return direct


def mc_summary(values):
    """Median, quartiles, and mean of a batch of replication scores.

    Median uses the midpoint-of-two rule for even counts; quartiles use
    linear interpolation (numpy's default percentile method, the
    classical type-7 convention).
    """
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("mc_summary needs a nonempty 1-D collection of values")
    if not np.all(np.isfinite(v)):
        raise ValueError("summary values contain non-finite entries")
    q1, med, q3 = np.percentile(v, [25.0, 50.0, 75.0])
    return SummaryStats(float(med), float(q1), float(q3), float(v.mean()))
