"""Dense Hermitian linear algebra for the Gram matrix and its inverse square root."""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "NotPositiveDefinite",
    "SeriesNotCertified",
    "binom_neg_half",
    "deleted_row_sums",
    "inv_sqrt_eigen",
    "inv_sqrt_series",
    "jacobi_eigh",
    "matrix_inf_norm",
    "max_entry",
]


class NotPositiveDefinite(ArithmeticError):
    def __init__(self, eigenvalue: float):
        super().__init__(f"matrix is not positive definite (eigenvalue {eigenvalue!r})")
        self.eigenvalue = eigenvalue


class SeriesNotCertified(ArithmeticError):
    pass


def matrix_inf_norm(A) -> float:
    """Max absolute row sum, the l-infinity operator norm."""
    A = np.atleast_2d(np.asarray(A))
    return float(np.abs(A).sum(axis=1).max()) if A.size else 0.0


def deleted_row_sums(A) -> np.ndarray:
    """``R'_i(A) = sum_{j != i} |A_ij|``."""
    a = np.abs(np.atleast_2d(np.asarray(A)))
    # zero the diagonal rather than subtract it: tiny entries next to 1 survive
    a = a.copy()
    np.fill_diagonal(a, 0.0)
    return a.sum(axis=1)


def max_entry(A) -> float:
    A = np.asarray(A)
    return float(np.abs(A).max()) if A.size else 0.0


def jacobi_eigh(A, tol: float = 1e-15, max_sweeps: int = 60):
    """Eigen-decomposition of a complex Hermitian matrix by cyclic Jacobi.

    Each rotation first removes the phase of the pivot ``A[p, q]`` with a
    diagonal unitary, then applies the real symmetric Jacobi rotation.
    Returns ascending eigenvalues ``w`` and unitary ``V`` with
    ``A = V diag(w) V^H``.
    """
    a = np.array(A, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if np.abs(a - a.conj().T).max(initial=0.0) > 1e-12 * max(1.0, np.abs(a).max(initial=0.0)):
        raise ValueError("matrix is not Hermitian")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    scale = max(np.linalg.norm(a), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = abs(apq)
                if g == 0.0:
                    continue
                app, aqq = a[p, p].real, a[q, q].real
                if abs(app) + 1e3 * g == abs(app) and abs(aqq) + 1e3 * g == abs(aqq):
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (aqq - app) / (2.0 * g)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ph = np.conj(apq) / g
                U = np.array([[c, s], [-s * ph, c * ph]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ U
                a[idx, :] = U.conj().T @ a[idx, :]
                v[:, idx] = v[:, idx] @ U
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def inv_sqrt_eigen(E, min_eig: float = 1e-12) -> np.ndarray:
    """Hermitian positive definite ``E^{-1/2}`` from the Jacobi eigen-decomposition."""
    w, V = jacobi_eigh(E)
    if w.size and w[0] <= min_eig:
        raise NotPositiveDefinite(float(w[0]))
    F = (V * (1.0 / np.sqrt(w))) @ V.conj().T
    return 0.5 * (F + F.conj().T)


def binom_neg_half(n_terms: int) -> np.ndarray:
    """``binom(-1/2, i)`` for ``i = 0 .. n_terms - 1``."""
    c = np.empty(n_terms)
    c[0] = 1.0
    for i in range(n_terms - 1):
        c[i + 1] = c[i] * (-0.5 - i) / (i + 1)
    return c


def inv_sqrt_series(E, tol: float = 1e-12, max_terms: int = 10_000):
    """``(I + B)^{-1/2} = I + sum_i binom(-1/2, i) B^i`` with ``B = E - I``.

    Stops before the first term whose l-infinity norm is below ``tol``;
    returns ``(F, terms_used)``.  Raises :class:`SeriesNotCertified` when
    ``|||B||| >= 1``.
    """
    E = np.asarray(E, dtype=complex)
    n = E.shape[0]
    B = E - np.eye(n)
    nb = matrix_inf_norm(B)
    if nb >= 1.0:
        raise SeriesNotCertified(f"|||E - I||| = {nb!r} >= 1")
    F = np.eye(n, dtype=complex)
    power = np.eye(n, dtype=complex)
    coef = 1.0
    used = 0
    for i in range(max_terms):
        coef *= (-0.5 - i) / (i + 1)
        power = power @ B
        term = coef * power
        if matrix_inf_norm(term) < tol:
            break
        F += term
        used += 1
    else:
        raise SeriesNotCertified(f"no convergence after {max_terms} terms")
    return 0.5 * (F + F.conj().T), used
