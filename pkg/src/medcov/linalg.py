"""Dense symmetric-matrix helpers used throughout the package.

All matrices are plain float64 ``numpy`` arrays.  Symmetric inputs are
validated and re-symmetrized on entry so downstream code can rely on
exact symmetry.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, NumericalError

_SIGN_EPS = 1e-12


class EigenPair(NamedTuple):
    value: float
    vector: np.ndarray


def as_vector(x, *, dim=None):
    """Coerce ``x`` to a finite 1-D float64 array."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector contains non-finite entries")
    return v


def as_sym_matrix(a, *, dim=None, tol=1e-8):
    """Coerce ``a`` to an exactly symmetric float64 matrix.

    Asymmetry up to ``tol`` (relative to the largest entry) is folded
    away by averaging with the transpose; anything larger is an error.
    """
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if dim is not None and m.shape[0] != dim:
        raise ValueError(f"dimension mismatch: expected {dim}x{dim}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    scale = max(float(np.abs(m).max()), 1.0)
    gap = float(np.abs(m - m.T).max())
    if gap > tol * scale:
        raise ValueError(f"matrix is not symmetric (max asymmetry {gap:.3e})")
    return (m + m.T) / 2.0


def frob_inner(a, b):
    """Frobenius inner product <A, B> = sum_ij A_ij B_ij."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.tensordot(a, b))


def frob_norm(a):
    return float(np.linalg.norm(np.asarray(a, dtype=np.float64)))


def outer(x, y=None):
    """Rank-one matrix x y^T (x x^T when ``y`` is omitted)."""
    x = as_vector(x)
    y = x if y is None else as_vector(y, dim=x.shape[0])
    return np.outer(x, y)


def _fix_signs(vectors):
    """Flip column signs so the first coordinate with |v_i| > 1e-12 is positive."""
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        nz = np.nonzero(np.abs(col) > _SIGN_EPS)[0]
        if nz.size and col[nz[0]] < 0:
            col *= -1.0
    return vectors


def _sorted_pairs(values, vectors):
    order = np.argsort(-values, kind="stable")
    vectors = _fix_signs(vectors[:, order].copy())
    return [EigenPair(float(values[j]), vectors[:, k].copy()) for k, j in enumerate(order)]


def _off_norm(w):
    od = w.copy()
    np.fill_diagonal(od, 0.0)
    return float(np.linalg.norm(od))


def sym_eigen(a, tol=1e-10, max_sweeps=60):
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Returns eigenpairs sorted by descending eigenvalue.  Each eigenvector
    is normalized with its first coordinate of magnitude > 1e-12 made
    positive, which pins the sign deterministically.  Intended as the
    reference decomposition: slow but transparently correct.
    """
    w = as_sym_matrix(a)
    d = w.shape[0]
    v = np.eye(d)
    scale = frob_norm(w)
    if scale == 0.0:
        return _sorted_pairs(np.zeros(d), v)
    target = max(0.1 * tol, 1e-14) * scale
    skip = target / max(2 * d * d, 4)

    off = _off_norm(w)
    for _ in range(max_sweeps):
        if off <= target:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = w[p, q]
                if abs(apq) <= skip:
                    continue
                app, aqq = w[p, p], w[q, q]
                theta = (aqq - app) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.hypot(1.0, theta))
                if t == 0.0:  # theta overflowed; rotation angle is +-45 deg
                    t = 1.0 if theta >= 0 else -1.0
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                col_p = w[:, p].copy()
                col_q = w[:, q].copy()
                w[:, p] = c * col_p - s * col_q
                w[:, q] = s * col_p + c * col_q
                w[p, :] = w[:, p]
                w[q, :] = w[:, q]
                w[p, p] = app - t * apq
                w[q, q] = aqq + t * apq
                w[p, q] = 0.0
                w[q, p] = 0.0
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
        off = _off_norm(w)
    if off > target:
        raise ConvergenceError(
            f"Jacobi sweeps did not converge in {max_sweeps} sweeps "
            f"(off-diagonal norm {off:.3e})",
            last=w,
            residual=off,
        )
    return _sorted_pairs(np.diag(w).copy(), v)


def eigh_descending(a):
    """LAPACK eigendecomposition with the same ordering and sign conventions
    as :func:`sym_eigen`.

    Returns ``(values, vectors)`` with eigenvalues descending and
    eigenvectors in the columns of ``vectors``.  Used on hot paths where
    the Jacobi reference would be too slow.
    """
    w = as_sym_matrix(a)
    try:
        values, vectors = np.linalg.eigh(w)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - eigh on finite input
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    values = values[::-1].copy()
    vectors = _fix_signs(vectors[:, ::-1].copy())
    return values, vectors


def min_eigenvalue(a):
    """Smallest eigenvalue of a symmetric matrix."""
    w = as_sym_matrix(a)
    try:
        return float(np.linalg.eigvalsh(w)[0])
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericalError(f"eigenvalue computation failed: {exc}") from exc


def projector(basis):
    """Orthogonal projector U U^T onto the span of the given vectors.

    ``basis`` is a sequence of 1-D arrays (or a 2-D array of rows).  The
    vectors are orthonormalized by modified Gram-Schmidt; a pivot below
    1e-12 means the family is numerically rank deficient.
    """
    rows = np.atleast_2d(np.asarray(basis, dtype=np.float64))
    if rows.ndim != 2:
        raise ValueError("basis must be a sequence of vectors")
    if rows.shape[0] == 0:
        raise ValueError("basis is empty")
    if not np.all(np.isfinite(rows)):
        raise ValueError("basis contains non-finite entries")
    u = np.empty_like(rows)
    for i, vec in enumerate(rows):
        w = vec.copy()
        for j in range(i):
            w -= (u[j] @ w) * u[j]
        piv = float(np.linalg.norm(w))
        if piv < 1e-12:
            raise ValueError(
                f"basis vector {i} is numerically dependent on its "
                f"predecessors (pivot {piv:.3e})"
            )
        u[i] = w / piv
    return u.T @ u
