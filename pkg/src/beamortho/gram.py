"""Analytic Gram matrix of a beam family, its Geršgorin certificate and the
explicit row-sum bounds of the construction.

For two degree-k beams with poles at angle ``beta`` the inner product is
``e^{ik alpha} cos(beta/2)^{2k}``, where ``e^{ik alpha}`` is the ratio of the
two beams at an intersection point of their great circles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .beams import GaussianBeam
from .linalg import deleted_row_sums, jacobi_eigh
from .sphere import PoleSet, angle, build_delta, strip_counts

__all__ = [
    "C0",
    "GershgorinReport",
    "GramMatrix",
    "RBoundReport",
    "StripBound",
    "build_gram",
    "density_condition",
    "density_lhs",
    "gershgorin_certificate",
    "gram_entry",
    "load_matrix",
    "overlap_modulus",
    "save_matrix",
    "strip_riemann_sum",
    "strip_sum_bound",
    "theoretical_r",
]

C0 = math.exp(1.0 / 72.0)
SAME_POLE = 1e-9


def overlap_modulus(beta: float, k: int) -> float:
    """``cos(beta/2)^(2k)`` in log form; ``log1p(-sin^2)`` for small angles,
    ``log cos`` near the antipode where ``1 - sin^2`` cancels."""
    if k == 0:
        return 1.0
    s2 = math.sin(0.5 * beta) ** 2
    if s2 <= 0.5:
        return math.exp(k * math.log1p(-s2))
    c = math.cos(0.5 * beta)
    return math.exp(2 * k * math.log(c)) if c > 0 else 0.0


def gram_entry(b1: GaussianBeam, b2: GaussianBeam) -> complex:
    """``<b1, b2>`` in closed form."""
    if b1.k != b2.k:
        raise ValueError("beams of different degree")
    k = b1.k
    beta = angle(b1.pole, b2.pole)
    if beta > math.pi - SAME_POLE:
        return 0j if k > 0 else complex(1.0)
    if beta < SAME_POLE:
        y = b1.frame.a
    else:
        y = np.cross(b1.pole, b2.pole)
        y /= np.linalg.norm(y)
    mod = overlap_modulus(beta, k)
    if mod == 0.0:
        return 0j
    # unit-modulus ratio of the two beams at the intersection point
    z1 = complex(b1.frame.a @ y, b1.frame.b @ y)
    z2 = complex(b2.frame.a @ y, b2.frame.b @ y)
    ratio = z1 / z2
    ratio /= abs(ratio)
    return mod * ratio**k


@dataclass(frozen=True)
class GramMatrix:
    E: np.ndarray
    row_sums: np.ndarray
    r_emp: float

    @property
    def m(self) -> int:
        return self.E.shape[0]


def _from_matrix(E: np.ndarray) -> GramMatrix:
    rs = deleted_row_sums(E)
    return GramMatrix(E, rs, float(rs.max()) if rs.size else 0.0)


def build_gram(beams: Sequence[GaussianBeam]) -> GramMatrix:
    beams = list(beams)
    m = len(beams)
    if m == 0:
        raise ValueError("empty beam family")
    E = np.eye(m, dtype=complex)
    for i in range(m):
        for j in range(i + 1, m):
            e = gram_entry(beams[i], beams[j])
            E[i, j] = e
            E[j, i] = e.conjugate()
    return _from_matrix(E)


@dataclass(frozen=True)
class GershgorinReport:
    dominant: bool
    interval: tuple[float, float]
    eigenvalues: np.ndarray
    eig_check: bool


def gershgorin_certificate(G, tol: float = 1e-10) -> GershgorinReport:
    """Strict diagonal dominance of a unit-diagonal Hermitian matrix and
    containment of its spectrum in ``[1 - r, 1 + r]``."""
    if not isinstance(G, GramMatrix):
        G = _from_matrix(np.asarray(G, dtype=complex))
    r = G.r_emp
    w, _ = jacobi_eigh(G.E)
    lo, hi = 1.0 - r, 1.0 + r
    ok = bool(np.all(w >= lo - tol) and np.all(w <= hi + tol))
    return GershgorinReport(bool(r < 1.0), (lo, hi), w, ok)


# --------------------------------------------------------------------------
# theoretical bounds


def density_lhs(D: float) -> float:
    """``(7 + 1296 D) c0^(-1/D)`` with ``c0 = e^(1/72)``."""
    return (7.0 + 1296.0 * D) * math.exp(-1.0 / (72.0 * D))


def density_condition(D: float) -> bool:
    if not 0 < D < 1:
        raise ValueError("density must satisfy 0 < D < 1")
    return density_lhs(D) <= 1.0 / 25.0


@dataclass(frozen=True)
class RBoundReport:
    D: float
    k: int
    c0: float
    groupI: float
    groupII: float
    groupIII: float
    r_theory: float
    admissible: bool


def theoretical_r(D: float, k: int) -> RBoundReport:
    """Three-group bound on the deleted row sums of the Gram matrix.

    Group I (nearest strip) ``7 c0^(-1/D)``, group II (strips within 1/2 rad)
    ``1296 D c0^(-1/D)``, group III (the rest) ``36 cos(1/8)^(2k) (2k+1)^2``.
    The last term only becomes small for large ``k``.
    """
    if not 0 < D < 1:
        raise ValueError("density must satisfy 0 < D < 1")
    if k < 1:
        raise ValueError("degree must be >= 1")
    decay = math.exp(-1.0 / (72.0 * D))
    g1 = 7.0 * decay
    g2 = 1296.0 * D * decay
    g3 = 36.0 * math.exp(2 * k * math.log(math.cos(0.125))) * (2 * k + 1) ** 2
    r = g1 + g2 + g3
    return RBoundReport(D, k, C0, g1, g2, g3, r, r <= 1.0 / 24.0)


@dataclass(frozen=True)
class StripBound:
    bound: float
    delta: float
    counts: np.ndarray
    caps: np.ndarray
    caps_hold: bool


def strip_sum_bound(ps: PoleSet, i: int, k: int) -> StripBound:
    """Explicit upper bound on ``R'_i(E)`` from per-strip pole caps.

    ``7 cos(delta/2)^(2k) + sum_{l>=2} (36 sin((l-1) delta)/delta) cos((l-1) delta/2)^(2k)``
    with ``delta`` built from the set's minimal separation.  The bound is
    valid whenever the counted strip populations respect the caps, which is
    reported rather than assumed.
    """
    if ps.m < 2:
        raise ValueError("need at least two poles")
    delta = build_delta(min(ps.d_min, math.pi))
    part = strip_counts(ps, i, delta)
    n = part.n_strips
    l = np.arange(1, n + 1)
    caps = np.empty(n)
    caps[0] = 7.0
    caps[1:] = 36.0 * np.sin((l[1:] - 1) * delta) / delta
    mods = np.array([overlap_modulus(delta, k)] + [overlap_modulus((j - 1) * delta, k) for j in l[1:]])
    bound = float(np.sum(caps * mods))
    # caps are integer pole counts; compare with a hair of slack for sin(pi)
    hold = bool(np.all(part.counts <= np.floor(caps + 1e-9)))
    return StripBound(bound, delta, part.counts, caps, hold)


def strip_riemann_sum(delta: float, k: int) -> float:
    """Riemann sum of ``sin(phi) cos(phi/2)^(2k)`` on the strip partition:
    right endpoint on the first strip, left endpoints on the others."""
    n = max(1, math.ceil(math.pi / delta - 1e-12))
    total = math.sin(delta) * overlap_modulus(delta, k) * delta
    for l in range(2, n + 1):
        phi = (l - 1) * delta
        total += math.sin(phi) * overlap_modulus(phi, k) * delta
    return total


# --------------------------------------------------------------------------
# text format: one matrix row per line, entries "re,im" separated by spaces


def save_matrix(A, path) -> None:
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    lines = [f"# rows={A.shape[0]} cols={A.shape[1]}"]
    for row in A:
        lines.append(" ".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_matrix(path) -> np.ndarray:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([complex(float(re), float(im)) for re, im in (tok.split(",") for tok in line.split())])
    return np.array(rows, dtype=complex)
