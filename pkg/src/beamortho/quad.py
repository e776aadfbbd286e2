"""Product quadrature on the unit sphere.

Nodes are Gauss-Legendre in ``t = cos(phi)`` times a uniform rule in
``theta``.  With ``n_phi >= N/2 + 1`` and ``n_theta >= N + 1`` the rule
integrates every Cartesian polynomial of degree ``N`` exactly, which covers
``|f|^p`` for a degree-k harmonic ``f`` and even ``p`` once ``N >= p k``.

Grids are never materialized in full; evaluation streams over blocks of
``phi`` rows and reduces block by block in a fixed order, so results are
bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, Sequence

import numpy as np

from .sphere import Frame

__all__ = [
    "GridTooLarge",
    "LpResult",
    "SphereGrid",
    "TubeMass",
    "band_grid",
    "build_grid",
    "gauss_legendre",
    "gram_quadrature",
    "inner_product",
    "integral_identity_check",
    "integrate",
    "lp_norm",
    "lp_norm_converged",
    "lp_norms",
    "tube_mass",
]

MAX_NODES = 2_000_000_000
CHUNK_VALUES = 2_000_000  # evaluated entries per block (nodes x functions)


class GridTooLarge(MemoryError):
    pass


@lru_cache(maxsize=32)
def _gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n == 1:
        return np.array([0.0]), np.array([2.0])
    half = (n + 1) // 2
    i = np.arange(1, half + 1)
    x = (1.0 - (n - 1) / (8.0 * n**3)) * np.cos(math.pi * (4 * i - 1) / (4 * n + 2))
    for _ in range(100):
        p0 = np.ones_like(x)
        p1 = x.copy()
        for j in range(2, n + 1):
            p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
        dp = n * (x * p1 - p0) / (x * x - 1.0)
        dx = p1 / dp
        x = x - dx
        if np.abs(dx).max() < 1e-16:
            break
    # final derivative at the converged nodes
    p0 = np.ones_like(x)
    p1 = x.copy()
    for j in range(2, n + 1):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    if n % 2:
        x[-1] = 0.0
    # x is descending and positive; mirror into ascending order on [-1, 1]
    xs = np.concatenate([-x, x[::-1][n % 2:]])
    ws = np.concatenate([w, w[::-1][n % 2:]])
    xs.setflags(write=False)
    ws.setflags(write=False)
    return xs, ws


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes (ascending) and weights on ``[-1, 1]``.

    Newton iteration on the three-term recurrence from the standard
    asymptotic initial guess.
    """
    if n < 1:
        raise ValueError("need at least one node")
    return _gauss_legendre(int(n))


@dataclass(frozen=True)
class SphereGrid:
    """Product rule: ``t`` nodes with weights ``wt`` times ``n_theta`` uniform angles.

    ``rotation`` (rows ``a, b, pole`` of a frame) places the rule's own
    north pole at ``pole``; ``None`` means the identity.  ``degree`` is the
    Cartesian polynomial degree the rule integrates exactly over its
    ``t``-range.
    """

    degree: int
    t: np.ndarray
    wt: np.ndarray
    n_theta: int
    rotation: np.ndarray | None = None

    @property
    def n_phi(self) -> int:
        return len(self.t)

    @property
    def n_nodes(self) -> int:
        return self.n_phi * self.n_theta

    def total_weight(self) -> float:
        return math.fsum(self.wt) * 2.0 * math.pi

    def chunks(self, n_funcs: int = 1) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        """Yield ``(points, weights)`` blocks of whole ``phi`` rows."""
        theta = 2.0 * math.pi * np.arange(self.n_theta) / self.n_theta
        ct, st = np.cos(theta), np.sin(theta)
        dw = 2.0 * math.pi / self.n_theta
        rows = max(1, CHUNK_VALUES // (self.n_theta * max(1, n_funcs)))
        s_all = np.sqrt((1.0 - self.t) * (1.0 + self.t))
        for r0 in range(0, self.n_phi, rows):
            t = self.t[r0:r0 + rows]
            s = s_all[r0:r0 + rows]
            pts = np.empty((len(t), self.n_theta, 3))
            pts[..., 0] = s[:, None] * ct
            pts[..., 1] = s[:, None] * st
            pts[..., 2] = t[:, None]
            pts = pts.reshape(-1, 3)
            if self.rotation is not None:
                pts = pts @ self.rotation
            w = np.repeat(self.wt[r0:r0 + rows] * dw, self.n_theta)
            yield pts, w

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        """All nodes and weights at once (small grids only)."""
        if self.n_nodes > 50_000_000:
            raise GridTooLarge(f"{self.n_nodes} nodes; use chunks()")
        pts, ws = zip(*self.chunks())
        return np.concatenate(pts), np.concatenate(ws)


def _check_size(n_phi: int, n_theta: int) -> None:
    if n_phi * n_theta > MAX_NODES:
        raise GridTooLarge(f"grid with {n_phi} x {n_theta} nodes exceeds {MAX_NODES}")


def build_grid(N: int) -> SphereGrid:
    """Grid exact for Cartesian polynomials of degree ``N`` on the whole sphere."""
    if N < 0:
        raise ValueError("degree must be non-negative")
    n_phi, n_theta = N // 2 + 1, N + 1
    _check_size(n_phi, n_theta)
    t, wt = gauss_legendre(n_phi)
    return SphereGrid(int(N), t, wt, n_theta)


def band_grid(t0: float, t1: float, N: int, frame: Frame | None = None) -> SphereGrid:
    """Grid over ``t0 <= t <= t1`` in the coordinates of ``frame``, exact
    for Cartesian polynomials of degree ``N`` restricted to that band."""
    if not -1.0 <= t0 <= t1 <= 1.0:
        raise ValueError("need -1 <= t0 <= t1 <= 1")
    n_phi, n_theta = N // 2 + 1, N + 1
    _check_size(n_phi, n_theta)
    x, w = gauss_legendre(n_phi)
    half = 0.5 * (t1 - t0)
    rot = None if frame is None else frame.matrix()
    return SphereGrid(int(N), 0.5 * (t0 + t1) + half * x, half * w, n_theta, rot)


# --------------------------------------------------------------------------
# functionals

Evaluable = Callable[[np.ndarray], np.ndarray]


def _n_funcs(f) -> int:
    return int(getattr(f, "n_funcs", 1))


def integrate(f: Evaluable, grid: SphereGrid, n_funcs: int | None = None):
    """``sum w f`` over the grid; ``f`` may return ``(n,)`` or ``(n, m)``."""
    total = None
    for pts, w in grid.chunks(n_funcs or _n_funcs(f)):
        part = np.tensordot(w, f(pts), axes=(0, 0))
        total = part if total is None else total + part
    return total


def inner_product(f: Evaluable, g: Evaluable, grid: SphereGrid) -> complex:
    """``<f, g> = int f conj(g)``."""
    total = 0.0 + 0.0j
    for pts, w in grid.chunks(2):
        total += complex(np.sum(w * f(pts) * np.conj(g(pts))))
    return total


def gram_quadrature(f: Evaluable, grid: SphereGrid) -> np.ndarray:
    """Matrix ``G[i, j] = <f_i, f_j>`` for a family ``f`` returning ``(n, m)``."""
    G = None
    for pts, w in grid.chunks(_n_funcs(f)):
        v = f(pts)
        part = (v.T * w) @ np.conj(v)
        G = part if G is None else G + part
    return G


def _abs_pow_sum(a2: np.ndarray, w: np.ndarray, p: float) -> np.ndarray:
    """``sum_n w_n |v_n|^p`` given ``a2 = |v|^2``."""
    q = p
    if q == int(q) and q <= 24:
        q = int(q)
        acc = None
        base = a2
        e = q // 2
        while e:
            if e & 1:
                acc = base if acc is None else acc * base
            e >>= 1
            if e:
                base = base * base
        if q % 2:
            r = np.sqrt(a2)
            acc = r if acc is None else acc * r
        vals = acc if acc is not None else np.ones_like(a2)
    else:
        vals = np.power(a2, 0.5 * p)
    return np.tensordot(w, vals, axes=(0, 0))


def lp_norms(f: Evaluable, ps: Sequence[float], grid: SphereGrid, extra_points=None) -> np.ndarray:
    """L^p norms for several ``p`` in one pass over the grid.

    ``p = inf`` is the maximum modulus over the grid nodes and the optional
    ``extra_points``.  Returns shape ``(len(ps),)`` or ``(len(ps), m)``.
    """
    ps = [float(p) for p in ps]
    if any(p < 1 for p in ps):
        raise ValueError("p must be >= 1")
    sums = [None] * len(ps)
    peak = None
    for pts, w in grid.chunks(_n_funcs(f)):
        v = f(pts)
        a2 = v.real * v.real + v.imag * v.imag
        for n, p in enumerate(ps):
            if math.isinf(p):
                part = a2.max(axis=0)
                peak = part if peak is None else np.maximum(peak, part)
            else:
                part = _abs_pow_sum(a2, w, p)
                sums[n] = part if sums[n] is None else sums[n] + part
    if extra_points is not None and any(math.isinf(p) for p in ps):
        extra = np.asarray(extra_points, dtype=float).reshape(-1, 3)
        step = max(1, CHUNK_VALUES // max(1, _n_funcs(f)))
        for s in range(0, len(extra), step):
            v = f(extra[s:s + step])
            peak = np.maximum(peak, (v.real**2 + v.imag**2).max(axis=0))
    out = []
    for n, p in enumerate(ps):
        out.append(np.sqrt(peak) if math.isinf(p) else sums[n] ** (1.0 / p))
    return np.array(out)


def lp_norm(f: Evaluable, p: float, grid: SphereGrid, extra_points=None):
    """``(int |f|^p)^(1/p)``; exact when ``p`` is even and ``grid.degree >= p deg f``."""
    r = lp_norms(f, [p], grid, extra_points)[0]
    return float(r) if np.ndim(r) == 0 else r


def _is_even_int(p: float) -> bool:
    return not math.isinf(p) and p == int(p) and int(p) % 2 == 0


@dataclass(frozen=True)
class LpResult:
    """Norms with their convergence record.

    ``values[n]`` is the norm for ``ps[n]`` at the finest level computed;
    ``estimates[n]`` is the relative change from the previous level (zero
    for even ``p`` and for ``inf``, which are taken from the base level).
    """

    ps: tuple
    values: np.ndarray
    estimates: np.ndarray
    degrees: tuple
    converged: bool


def lp_norm_converged(
    f: Evaluable,
    ps: Sequence[float],
    degree: int,
    rtol: float = 1e-8,
    max_doublings: int = 2,
    extra_points=None,
    grid_scale: float = 1.0,
) -> LpResult:
    """L^p norms of a degree-``degree`` function with resolution doubling.

    The base grid has degree ``grid_scale * max(2, max finite p) * degree + 8``.
    It is exact for even ``p``; other ``p`` are recomputed on grids of twice
    the degree until successive values agree to ``rtol`` or
    ``max_doublings`` is reached.
    """
    ps = tuple(float(p) for p in ps)
    finite = [p for p in ps if not math.isinf(p)]
    pmax = max([2.0] + [float(math.ceil(p)) for p in finite])
    N = int(math.ceil(grid_scale * pmax * degree)) + 8
    base = lp_norms(f, ps, build_grid(N), extra_points)
    values = base.copy()
    est = np.zeros_like(values, dtype=float)
    degrees = [N]
    odd = [n for n, p in enumerate(ps) if not math.isinf(p) and not _is_even_int(p)]
    converged = True
    if odd:
        prev = base[odd]
        converged = False
        for _ in range(max_doublings):
            N *= 2
            degrees.append(N)
            cur = lp_norms(f, [ps[n] for n in odd], build_grid(N))
            rel = np.abs(cur - prev) / np.abs(cur)
            for row, n in enumerate(odd):
                values[n] = cur[row]
                est[n] = rel[row]
            prev = cur
            if np.all(rel <= rtol):
                converged = True
                break
    return LpResult(ps, values, est, tuple(degrees), converged)


def integral_identity_check(k: int) -> float:
    """``int_0^pi sin(phi) cos(phi/2)^(2k) dphi`` by Gauss-Legendre; equals ``2/(k+1)``.

    With ``t = cos(phi)`` the integrand is the polynomial ``((1+t)/2)^k``.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    x, w = gauss_legendre(k // 2 + 1)
    return math.fsum(w * (0.5 * (1.0 + x)) ** k)


@dataclass(frozen=True)
class TubeMass:
    inside: float | np.ndarray
    outside: float | np.ndarray
    under_resolved: bool


def tube_mass(f: Evaluable, frame: Frame, w: float, grid: SphereGrid) -> TubeMass:
    """L2 mass of ``f`` inside and outside the tube of half-width ``w``
    around the great circle of ``frame``.

    The tube is the band ``|t| <= sin w`` in the frame's coordinates, so it
    and its two caps are each integrated with a band rule of
    ``grid.degree``; no indicator function is involved.  ``under_resolved``
    is set when ``f`` reports a harmonic ``degree`` with
    ``2 * degree > grid.degree``.
    """
    if not 0 < w <= math.pi / 2:
        raise ValueError("tube half-width must lie in (0, pi/2]")
    s = math.sin(w)
    N = grid.degree

    def mass(t0, t1):
        if t1 <= t0:
            return 0.0
        r = integrate(lambda y: np.abs(f(y)) ** 2, band_grid(t0, t1, N, frame), _n_funcs(f))
        return float(r) if np.ndim(r) == 0 else r

    inside = mass(-s, s)
    outside = mass(-1.0, -s) + mass(s, 1.0) + np.zeros_like(inside)
    deg = getattr(f, "degree", None)
    under = deg is not None and 2 * deg > N
    return TubeMass(inside, outside, bool(under))
