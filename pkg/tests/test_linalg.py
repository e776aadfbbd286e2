import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beamortho.linalg import (
    NotPositiveDefinite,
    SeriesNotCertified,
    binom_neg_half,
    deleted_row_sums,
    inv_sqrt_eigen,
    inv_sqrt_series,
    jacobi_eigh,
    matrix_inf_norm,
    max_entry,
)


def random_hermitian(n, rng):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return A + A.conj().T


def test_matrix_inf_norm_examples():
    assert matrix_inf_norm(np.eye(4)) == 1.0
    assert matrix_inf_norm([[1, 0.3], [0.3, 1]]) == pytest.approx(1.3)


def test_inf_norm_of_deleted_part_is_max_row_sum(rng):
    E = np.eye(6) + 0.05 * random_hermitian(6, rng)
    np.fill_diagonal(E, 1.0)
    assert matrix_inf_norm(E - np.eye(6)) == pytest.approx(deleted_row_sums(E).max())


def test_deleted_row_sums_keep_tiny_entries():
    E = np.array([[1.0, 1e-30], [1e-30, 1.0]])
    assert np.all(deleted_row_sums(E) == 1e-30)


@given(st.integers(1, 12), st.integers(0, 2**31))
@settings(max_examples=40, deadline=None)
def test_jacobi_matches_numpy(n, seed):
    rng = np.random.default_rng(seed)
    A = random_hermitian(n, rng)
    w, V = jacobi_eigh(A)
    assert np.allclose(w, np.linalg.eigvalsh(A), atol=1e-12 * max(1, np.abs(w).max()))
    assert np.allclose(V.conj().T @ V, np.eye(n), atol=1e-12)
    assert np.allclose((V * w) @ V.conj().T, A, atol=1e-11 * max(1, np.abs(A).max()))


def test_jacobi_diagonal_and_degenerate():
    w, V = jacobi_eigh(np.diag([3.0, 1.0, 2.0]))
    assert list(w) == [1.0, 2.0, 3.0]
    w, _ = jacobi_eigh(np.ones((3, 3)))
    assert np.allclose(w, [0, 0, 3], atol=1e-14)


def test_jacobi_rejects_non_hermitian():
    with pytest.raises(ValueError):
        jacobi_eigh([[1, 2], [0, 1]])
    with pytest.raises(ValueError):
        jacobi_eigh(np.ones((2, 3)))


def test_inv_sqrt_eigen_examples():
    assert np.allclose(inv_sqrt_eigen(np.eye(3)), np.eye(3))
    assert inv_sqrt_eigen([[4.0]])[0, 0] == pytest.approx(0.5)
    E = np.array([[1, 0.5], [0.5, 1]])
    F = inv_sqrt_eigen(E)
    assert max_entry(F @ E @ F - np.eye(2)) < 1e-12
    assert np.allclose(np.linalg.eigvalsh(F), sorted([1 / math.sqrt(1.5), 1 / math.sqrt(0.5)]))


def test_inv_sqrt_eigen_complex_is_hermitian_pd(rng):
    E = np.eye(8) + 0.1 * random_hermitian(8, rng)
    F = inv_sqrt_eigen(E)
    assert np.allclose(F, F.conj().T)
    assert np.linalg.eigvalsh(F).min() > 0
    assert max_entry(F @ E @ F - np.eye(8)) < 1e-12


def test_inv_sqrt_eigen_not_pd():
    with pytest.raises(NotPositiveDefinite) as exc:
        inv_sqrt_eigen([[1.0, 2.0], [2.0, 1.0]])
    assert exc.value.eigenvalue == pytest.approx(-1.0)


def test_binom_neg_half():
    c = binom_neg_half(5)
    assert np.allclose(c, [1, -0.5, 3 / 8, -5 / 16, 35 / 128])
    assert np.all(np.abs(binom_neg_half(200)) <= 1)


def test_inv_sqrt_series_identity_and_scalar():
    F, n = inv_sqrt_series(np.eye(3))
    assert n == 0 and np.allclose(F, np.eye(3))
    F, n = inv_sqrt_series([[1.2]], tol=1e-12)
    assert F[0, 0] == pytest.approx(1.2**-0.5, abs=1e-11)
    assert n > 0


@given(st.integers(1, 10), st.floats(0.01, 0.9), st.integers(0, 2**31))
@settings(max_examples=40, deadline=None)
def test_series_agrees_with_eigen(n, scale, seed):
    rng = np.random.default_rng(seed)
    B = random_hermitian(n, rng)
    np.fill_diagonal(B, 0)
    if matrix_inf_norm(B) > 0:
        B *= scale / matrix_inf_norm(B)
    E = np.eye(n) + B
    tol = 1e-12
    Fs, _ = inv_sqrt_series(E, tol)
    assert max_entry(Fs - inv_sqrt_eigen(E)) <= 10 * tol * max(1, 1 / (1 - scale))


@given(st.floats(0.0, 1 / 24), st.integers(0, 2**31))
@settings(max_examples=30, deadline=None)
def test_h_norm_bounded_by_six_r(r, seed):
    rng = np.random.default_rng(seed)
    B = random_hermitian(7, rng)
    np.fill_diagonal(B, 0)
    B *= r / matrix_inf_norm(B)
    F = inv_sqrt_eigen(np.eye(7) + B)
    assert matrix_inf_norm(F - np.eye(7)) <= 6 * r + 1e-14


def test_series_rejects_large_b():
    with pytest.raises(SeriesNotCertified):
        inv_sqrt_series([[1.0, 1.0], [1.0, 1.0]])
