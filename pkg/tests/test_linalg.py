"""Kernel tests: Frobenius geometry, the Jacobi reference eigensolver,
and projector algebra."""

import numpy as np
import pytest

from medcov import (
    ConvergenceError,
    eigh_descending,
    frob_inner,
    frob_norm,
    min_eigenvalue,
    outer,
    projector,
    sym_eigen,
)
from medcov.linalg import as_sym_matrix, as_vector


def random_orthogonal(d, rng):
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def random_symmetric(d, rng):
    a = rng.standard_normal((d, d))
    return (a + a.T) / 2.0


# ---------------------------------------------------------------------------
# coercion helpers

def test_as_vector_rejects_bad_input():
    with pytest.raises(ValueError):
        as_vector([[1.0, 2.0]])
    with pytest.raises(ValueError):
        as_vector([1.0, np.nan])
    with pytest.raises(ValueError):
        as_vector([1.0, 2.0], dim=3)


def test_as_sym_matrix_symmetrizes_and_rejects():
    m = as_sym_matrix([[1.0, 2.0 + 1e-12], [2.0, 3.0]])
    assert m[0, 1] == m[1, 0]
    with pytest.raises(ValueError):
        as_sym_matrix([[1.0, 5.0], [2.0, 3.0]])
    with pytest.raises(ValueError):
        as_sym_matrix([[1.0, np.inf], [np.inf, 3.0]])
    with pytest.raises(ValueError):
        as_sym_matrix(np.ones((2, 3)))


# ---------------------------------------------------------------------------
# Frobenius inner product and rank-one outer products

def test_frob_inner_identity():
    assert frob_inner(np.eye(2), np.eye(2)) == 2.0


def test_frob_inner_zero_annihilates():
    a = np.array([[1.0, 2.0], [2.0, 3.0]])
    assert frob_inner(a, np.zeros((2, 2))) == 0.0


def test_frob_inner_hand_value():
    a = np.array([[1.0, 2.0], [2.0, 3.0]])
    b = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert frob_inner(a, b) == 4.0
    assert frob_inner(b, a) == 4.0


def test_frob_inner_is_squared_norm():
    rng = np.random.default_rng(0)
    for _ in range(10):
        a = random_symmetric(5, rng)
        assert frob_inner(a, a) >= 0.0
        assert frob_inner(a, a) == pytest.approx(frob_norm(a) ** 2, rel=1e-12)
    assert frob_inner(np.zeros((3, 3)), np.zeros((3, 3))) == 0.0


def test_outer_basis_vector():
    np.testing.assert_array_equal(outer([1.0, 0.0]), [[1.0, 0.0], [0.0, 0.0]])


def test_outer_zero():
    np.testing.assert_array_equal(outer(np.zeros(3)), np.zeros((3, 3)))


def test_outer_expansion_and_norm():
    y = outer([1.0, 2.0])
    np.testing.assert_array_equal(y, [[1.0, 2.0], [2.0, 4.0]])
    # |xx^T|_F = |x|^2
    assert frob_norm(y) == pytest.approx(5.0, abs=1e-12)


def test_rank_one_distance_rotation_invariant():
    # |xx^T - yy^T|_F does not change when x and y rotate together
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = rng.standard_normal(6)
        y = rng.standard_normal(6)
        q = random_orthogonal(6, rng)
        base = frob_norm(outer(x) - outer(y))
        rotated = frob_norm(outer(q @ x) - outer(q @ y))
        assert rotated == pytest.approx(base, rel=1e-10)


# ---------------------------------------------------------------------------
# eigendecomposition

def test_sym_eigen_diagonal():
    pairs = sym_eigen(np.diag([3.0, 1.0]))
    assert [p.value for p in pairs] == pytest.approx([3.0, 1.0])
    np.testing.assert_allclose(pairs[0].vector, [1.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(pairs[1].vector, [0.0, 1.0], atol=1e-12)


def test_sym_eigen_two_by_two_hand_case():
    # [[2,1],[1,2]]: eigenvalues 3 and 1, vectors (1,1)/sqrt2 and (1,-1)/sqrt2
    pairs = sym_eigen(np.array([[2.0, 1.0], [1.0, 2.0]]))
    s = 1.0 / np.sqrt(2.0)
    assert pairs[0].value == pytest.approx(3.0, abs=1e-10)
    assert pairs[1].value == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(pairs[0].vector, [s, s], atol=1e-10)
    np.testing.assert_allclose(pairs[1].vector, [s, -s], atol=1e-10)


def test_sym_eigen_zero_matrix():
    pairs = sym_eigen(np.zeros((4, 4)))
    assert all(p.value == 0.0 for p in pairs)


def test_sym_eigen_reconstructs_random_matrices():
    rng = np.random.default_rng(2)
    for d in (2, 7, 33, 64):
        a = random_symmetric(d, rng)
        pairs = sym_eigen(a)
        recon = sum(p.value * outer(p.vector) for p in pairs)
        assert frob_norm(a - recon) <= 1e-9 * max(frob_norm(a), 1.0)
        vecs = np.array([p.vector for p in pairs])
        np.testing.assert_allclose(vecs @ vecs.T, np.eye(d), atol=1e-9)
        values = [p.value for p in pairs]
        assert values == sorted(values, reverse=True)


def test_sym_eigen_sign_convention():
    rng = np.random.default_rng(3)
    a = random_symmetric(9, rng)
    for p in sym_eigen(a):
        nz = p.vector[np.abs(p.vector) > 1e-12]
        assert nz[0] > 0


def test_sym_eigen_iteration_cap():
    rng = np.random.default_rng(4)
    with pytest.raises(ConvergenceError) as err:
        sym_eigen(random_symmetric(12, rng), max_sweeps=1)
    assert err.value.residual is not None


def test_eigh_descending_matches_jacobi():
    rng = np.random.default_rng(5)
    for d in (3, 10, 25):
        a = random_symmetric(d, rng)
        pairs = sym_eigen(a)
        values, vectors = eigh_descending(a)
        np.testing.assert_allclose(values, [p.value for p in pairs], atol=1e-8)
        for j, p in enumerate(pairs):
            np.testing.assert_allclose(vectors[:, j], p.vector, atol=1e-7)


def test_min_eigenvalue():
    assert min_eigenvalue(np.diag([3.0, -2.0])) == pytest.approx(-2.0)
    assert min_eigenvalue(outer([1.0, 2.0, 2.0])) == pytest.approx(0.0, abs=1e-12)
    assert min_eigenvalue([[2.0, 1.0], [1.0, 2.0]]) == pytest.approx(1.0)
    rng = np.random.default_rng(6)
    a = random_symmetric(8, rng)
    assert min_eigenvalue(a) == pytest.approx(sym_eigen(a)[-1].value, abs=1e-8)


# ---------------------------------------------------------------------------
# projectors

def test_projector_single_basis_vector():
    np.testing.assert_allclose(projector([[1.0, 0.0, 0.0]]), np.diag([1.0, 0.0, 0.0]))


def test_projector_two_basis_vectors():
    p = projector([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    np.testing.assert_allclose(p, np.diag([1.0, 1.0, 0.0]))
    assert np.trace(p) == pytest.approx(2.0)


def test_projector_normalizes():
    np.testing.assert_allclose(projector([[1.0, 1.0]]),
                               [[0.5, 0.5], [0.5, 0.5]], atol=1e-12)


def test_projector_idempotent_and_symmetric():
    rng = np.random.default_rng(7)
    basis = rng.standard_normal((3, 6))
    p = projector(basis)
    np.testing.assert_allclose(p, p.T, atol=1e-12)
    np.testing.assert_allclose(p @ p, p, atol=1e-8)
    assert np.trace(p) == pytest.approx(3.0, abs=1e-8)


def test_projector_depends_only_on_span():
    rng = np.random.default_rng(8)
    basis = rng.standard_normal((2, 5))
    mixed = np.array([3.0 * basis[0] - basis[1], 0.25 * basis[1] + basis[0]])
    assert frob_norm(projector(basis) - projector(mixed)) < 1e-8


def test_projector_rejects_rank_deficient():
    with pytest.raises(ValueError):
        projector([[1.0, 0.0], [2.0, 0.0]])
