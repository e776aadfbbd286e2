"""Symmetric orthonormalization ``u = F q`` with ``F = E^{-1/2}`` and the
checks that the ``u_i`` keep the beams' L^p size."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .beams import GaussianBeam, beam_values, corollary_exponent, north_beam, sigma
from .gram import GramMatrix, build_gram
from .linalg import (
    SeriesNotCertified,
    deleted_row_sums,
    inv_sqrt_eigen,
    inv_sqrt_series,
    matrix_inf_norm,
    max_entry,
)
from .quad import SphereGrid, build_grid, gram_quadrature, lp_norm_converged, lp_norms

__all__ = [
    "FBoundsReport",
    "LpReport",
    "NormTable",
    "OrthoSet",
    "ReconciliationError",
    "ScalingReport",
    "average_bound_check",
    "f_bounds_check",
    "fit_slope",
    "lp_table",
    "ortho_eval",
    "orthonormalize",
    "ring_points",
    "verify_corollary_scaling",
    "verify_lp_lower_bound",
]

# |q_j| below NEGLIGIBLE * c_k is not evaluated (taken as 0)
NEGLIGIBLE = 1e-16
# off-diagonal entries of F below this are dropped when evaluating u_i;
# the change in any norm of u_i is at most m * F_PRUNE * ||q||
F_PRUNE = 1e-18
SERIES_LIMIT = 0.9


class ReconciliationError(ArithmeticError):
    """Eigen-decomposition and power series disagree on ``E^{-1/2}``."""


@dataclass(frozen=True)
class OrthoSet:
    beams: tuple
    E: np.ndarray
    F: np.ndarray
    r_emp: float
    H_norm: float
    f_diag_range: tuple[float, float]
    f_row_sums: np.ndarray
    fef_error: float
    series_terms: int | None
    series_discrepancy: float | None
    ortho_error: float | None = None

    @property
    def m(self) -> int:
        return len(self.beams)

    @property
    def k(self) -> int:
        return self.beams[0].k

    def family(self, with_beams: bool = False, with_reference: bool = False) -> "_Family":
        return _Family(self, with_beams, with_reference)

    def values(self, y) -> np.ndarray:
        """``u_j(y)`` for all ``j``; shape ``(..., m)``."""
        y = np.asarray(y, dtype=float)
        return self.family()(y.reshape(-1, 3)).reshape(y.shape[:-1] + (self.m,))


class _Family:
    """Evaluable returning the columns ``[u_1..u_m | q_1..q_m | Q_k]``
    (the last two blocks optional)."""

    def __init__(self, os: OrthoSet, with_beams: bool, with_reference: bool):
        self.os = os
        self.degree = os.k
        self.with_beams = with_beams
        self.beams = list(os.beams) + ([north_beam(os.k)] if with_reference else [])
        m = os.m
        self.n_funcs = m + (m if with_beams else 0) + (1 if with_reference else 0)
        F = os.F
        self.diag = np.diag(F).copy()
        off = [(i, j, F[i, j]) for i in range(m) for j in range(m) if i != j and abs(F[i, j]) >= F_PRUNE]
        self.off = off

    def __call__(self, y):
        q = beam_values(self.beams, y, floor=NEGLIGIBLE)
        m = self.os.m
        out = np.empty((q.shape[0], self.n_funcs), dtype=complex)
        u = out[:, :m]
        np.multiply(q[:, :m], self.diag, out=u)
        for i, j, f in self.off:
            u[:, i] += f * q[:, j]
        if self.with_beams:
            out[:, m:] = q
        else:
            out[:, m:] = q[:, m:]
        return out


def orthonormalize(
    beams: Sequence[GaussianBeam],
    E=None,
    tol: float = 1e-12,
    quad_check: bool = True,
    fef_tol: float = 1e-10,
) -> OrthoSet:
    """Build ``u = E^{-1/2} q``.

    The eigen-decomposition route is primary.  When ``|||E - I||| < 0.9`` the
    binomial series is run as well and must agree within ``10 tol``.  With
    ``quad_check`` the Gram matrix of the ``u_i`` is recomputed by exact
    quadrature and its distance to the identity stored in ``ortho_error``.
    """
    beams = tuple(beams)
    if E is None:
        E = build_gram(beams)
    if isinstance(E, GramMatrix):
        E = E.E
    E = np.asarray(E, dtype=complex)
    m = len(beams)
    if E.shape != (m, m):
        raise ValueError("Gram matrix does not match the beam family")
    F = inv_sqrt_eigen(E)
    fef = max_entry(F @ E @ F - np.eye(m))
    if fef > fef_tol:
        raise ReconciliationError(f"||FEF - I||_max = {fef!r}")
    B = E - np.eye(m)
    terms = disc = None
    if matrix_inf_norm(B) < SERIES_LIMIT:
        try:
            Fs, terms = inv_sqrt_series(E, tol)
        except SeriesNotCertified:
            pass
        else:
            disc = max_entry(F - Fs)
            if disc > 10 * tol:
                raise ReconciliationError(f"eigen and series inverse roots differ by {disc!r}")
    d = np.diag(F).real
    os = OrthoSet(
        beams=beams,
        E=E,
        F=F,
        r_emp=float(deleted_row_sums(E).max()) if m else 0.0,
        H_norm=matrix_inf_norm(F - np.eye(m)),
        f_diag_range=(float(d.min()), float(d.max())),
        f_row_sums=deleted_row_sums(F),
        fef_error=fef,
        series_terms=terms,
        series_discrepancy=disc,
    )
    if quad_check:
        G = gram_quadrature(os.family(), build_grid(2 * os.k))
        os = replace(os, ortho_error=max_entry(G - np.eye(m)))
    return os


def ortho_eval(os: OrthoSet, i: int, y):
    """``u_i(y) = sum_j F_ij q_j(y)``."""
    if not 0 <= i < os.m:
        raise IndexError(f"index {i} out of range for {os.m} functions")
    y = np.asarray(y, dtype=float)
    q = beam_values(os.beams, y.reshape(-1, 3))
    v = q @ os.F[i]
    return complex(v[0]) if y.ndim == 1 else v.reshape(y.shape[:-1])


# --------------------------------------------------------------------------
# bounds on F


@dataclass(frozen=True)
class FBoundsReport:
    r: float
    diag: np.ndarray
    row_sums: np.ndarray
    weak_applicable: bool
    weak_diag_ok: np.ndarray
    weak_rows_ok: np.ndarray
    strong_applicable: bool
    strong_diag_ok: np.ndarray | None
    strong_rows_ok: np.ndarray | None
    passed: bool


def f_bounds_check(os: OrthoSet, r: float | None = None) -> FBoundsReport:
    """Check ``1 - 6r <= F_ii <= 1 + 6r`` and ``R'_i(F) <= 6r``; when
    ``r <= 1/24`` also ``3/4 <= F_ii <= 5/4`` and ``R'_i(F) <= 1/4``.

    The ``6r`` bounds rest on summing the binomial series, so they are
    only asserted for ``r <= 1/2``.
    """
    r = os.r_emp if r is None else float(r)
    d = np.diag(os.F).real
    rs = os.f_row_sums
    eps = 1e-12
    weak_app = r <= 0.5
    wd = (d >= 1 - 6 * r - eps) & (d <= 1 + 6 * r + eps)
    wr = rs <= 6 * r + eps
    strong_app = r <= 1.0 / 24.0
    sd = sr = None
    if strong_app:
        sd = (d >= 0.75) & (d <= 1.25)
        sr = rs <= 0.25
    ok = True
    if weak_app:
        ok &= bool(wd.all() and wr.all())
    if strong_app:
        ok &= bool(sd.all() and sr.all())
    return FBoundsReport(r, d, rs, weak_app, wd, wr, strong_app, sd, sr, ok)


# --------------------------------------------------------------------------
# L^p norms


def ring_points(beams: Sequence[GaussianBeam], N: int, offsets: int = 2) -> np.ndarray:
    """Points on and next to each beam's great circle, four times finer
    than a degree-``N`` grid; the sup of a beam-like function sits there."""
    n = 4 * (N + 1)
    th = 2 * math.pi * np.arange(n) / n
    h = math.pi / (2 * N + 2) / 4
    pts = []
    for b in beams:
        a, bb, p = b.frame.a, b.frame.b, b.frame.pole
        for l in range(-offsets, offsets + 1):
            w = l * h
            circ = np.cos(th)[:, None] * a + np.sin(th)[:, None] * bb
            pts.append(math.cos(w) * circ + math.sin(w) * p)
    return np.concatenate(pts)


@dataclass(frozen=True)
class NormTable:
    """L^p norms of the ``u_i``, of the beams ``q_i`` and of ``Q_k``."""

    ps: tuple
    u: np.ndarray  # (len(ps), m)
    q: np.ndarray | None  # (len(ps), m)
    reference: np.ndarray  # (len(ps),)
    estimates: np.ndarray
    degrees: tuple
    converged: bool

    def row(self, p: float) -> int:
        return self.ps.index(float(p))


def lp_table(
    os: OrthoSet,
    ps: Sequence[float],
    grid: SphereGrid | None = None,
    rtol: float = 1e-8,
    max_doublings: int = 2,
    grid_scale: float = 1.0,
    with_beams: bool = True,
) -> NormTable:
    """All requested norms in shared passes.

    Without ``grid`` the degree is chosen from ``ps`` (exact for even ``p``)
    and non-even ``p`` are refined by resolution doubling to ``rtol``.
    """
    ps = tuple(float(p) for p in ps)
    fam = os.family(with_beams=with_beams, with_reference=True)
    m = os.m
    if grid is not None:
        rings = ring_points(os.beams, grid.degree) if any(math.isinf(p) for p in ps) else None
        vals = lp_norms(fam, ps, grid, rings)
        est = np.zeros(len(ps))
        degrees = (grid.degree,)
        converged = True
    else:
        finite = [p for p in ps if not math.isinf(p)]
        pmax = max([2.0] + [float(math.ceil(p)) for p in finite])
        N0 = int(math.ceil(grid_scale * pmax * os.k)) + 8
        rings = ring_points(os.beams, N0) if any(math.isinf(p) for p in ps) else None
        res = lp_norm_converged(fam, ps, os.k, rtol, max_doublings, rings, grid_scale)
        vals, degrees, converged = res.values, res.degrees, res.converged
        est = res.estimates.max(axis=1) if res.estimates.ndim == 2 else res.estimates
    vals = np.atleast_2d(vals)
    u = vals[:, :m]
    q = vals[:, m:2 * m] if with_beams else None
    ref = vals[:, -1]
    return NormTable(ps, u, q, ref, np.asarray(est), tuple(degrees), bool(converged))


@dataclass(frozen=True)
class LpReport:
    p: float
    norms: np.ndarray
    beam_norms: np.ndarray | None
    baseline: float
    chain_bounds: np.ndarray
    margins: np.ndarray
    headline_ok: np.ndarray
    chain_ok: np.ndarray
    bound_applicable: bool
    estimate: float
    passed: bool


def verify_lp_lower_bound(os: OrthoSet, p: float, grid: SphereGrid | None = None, table: NormTable | None = None) -> LpReport:
    """``||u_i||_p >= ||Q_k||_p / 2`` and the triangle-inequality chain
    ``||u_i||_p >= F_ii ||q_i||_p - R'_i(F) max_j ||q_j||_p``.

    The half-baseline bound is asserted only for ``2 < p <= 6``
    (``bound_applicable``); other ``p`` are reported.
    """
    if table is None:
        table = lp_table(os, [p], grid)
    n = table.row(p)
    u = table.u[n]
    base = float(table.reference[n])
    q = table.q[n] if table.q is not None else np.full(os.m, base)
    d = np.diag(os.F).real
    chain = d * q - os.f_row_sums * q.max()
    slack = 1e-12 * base
    chain_ok = u >= chain - slack
    head_ok = u >= 0.5 * base
    applicable = 2 < p <= 6
    ok = bool(chain_ok.all() and (head_ok.all() or not applicable))
    return LpReport(
        p=float(p),
        norms=u,
        beam_norms=table.q[n] if table.q is not None else None,
        baseline=base,
        chain_bounds=chain,
        margins=u / base,
        headline_ok=head_ok,
        chain_ok=chain_ok,
        bound_applicable=applicable,
        estimate=float(table.estimates[n]),
        passed=ok,
    )


def average_bound_check(os: OrthoSet, table: NormTable, p: float, D: float) -> tuple[float, float, bool]:
    """Basis average ``(1/(2k+1)) sum_i ||u_i||_p`` against ``(D/3) ||Q_k||_p``."""
    n = table.row(p)
    lhs = float(np.sum(table.u[n])) / (2 * os.k + 1)
    rhs = D / 3.0 * float(table.reference[n])
    return lhs, rhs, lhs >= rhs


# --------------------------------------------------------------------------
# scaling in k


def fit_slope(ks, values) -> tuple[float, float, np.ndarray]:
    """Least-squares line through ``(log k, log value)``: slope, intercept, residuals."""
    x = np.log(np.asarray(ks, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[0]), float(coef[1]), y - A @ coef


@dataclass(frozen=True)
class ScalingReport:
    p: float
    ks: tuple
    values: tuple
    slope: float
    target: float
    residuals: tuple
    tol: float
    passed: bool


def verify_corollary_scaling(ks, min_norms, p: float, tol: float = 0.02, target: float | None = None) -> ScalingReport:
    """Fitted growth exponent of ``min_i ||u_i||_p`` against the expected one
    (``sigma(p)`` up to 6, ``1/4 - 1/(2p)`` beyond)."""
    if len(ks) < 3:
        raise ValueError("need at least three degrees to fit a slope")
    if target is None:
        target = sigma(p) if p <= 6 else corollary_exponent(p)
    slope, _, res = fit_slope(ks, min_norms)
    return ScalingReport(
        float(p), tuple(int(k) for k in ks), tuple(float(v) for v in min_norms),
        slope, float(target), tuple(float(r) for r in res), tol, abs(slope - target) <= tol,
    )
