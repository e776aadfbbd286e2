"""Unit-sphere geometry: pole sets, beam frames and the strip partition.

Points on the sphere are plain ``numpy`` arrays of shape ``(3,)`` (or
``(n, 3)`` for collections).  Angles between unit vectors are always taken
as ``atan2(|x × y|, x · y)``, which keeps full relative precision near 0
and near pi where ``arccos`` does not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Frame",
    "PoleSet",
    "SeparationReport",
    "StripPartition",
    "angle",
    "angles_from",
    "build_delta",
    "build_poles",
    "canonical_frame",
    "check_separation",
    "density_count",
    "fibonacci_lattice",
    "generate_poles",
    "load_poles",
    "min_separation",
    "random_rotation",
    "save_poles",
    "strip_counts",
]

REFINE_SWEEPS = 200


def _as_unit(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = np.linalg.norm(x, axis=-1, keepdims=True)
    if np.any(n == 0):
        raise ValueError("zero vector cannot be normalized")
    return x / n


def angle(x, y) -> float:
    """Geodesic angle between two unit vectors, in radians."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(math.atan2(np.linalg.norm(np.cross(x, y)), float(x @ y)))


def angles_from(x, points) -> np.ndarray:
    """Geodesic angles from ``x`` to each row of ``points``."""
    x = np.asarray(x, dtype=float)
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    cr = np.linalg.norm(np.cross(x, points), axis=1)
    return np.arctan2(cr, points @ x)


def _pairwise_angles(points: np.ndarray) -> np.ndarray:
    cr = np.linalg.norm(np.cross(points[:, None, :], points[None, :, :]), axis=-1)
    return np.arctan2(cr, points @ points.T)


def min_separation(points) -> float:
    """Smallest pairwise geodesic angle; ``inf`` when fewer than two points."""
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    if len(points) < 2:
        return math.inf
    a = _pairwise_angles(points)
    np.fill_diagonal(a, np.inf)
    return float(a.min())


# --------------------------------------------------------------------------
# frames


@dataclass(frozen=True)
class Frame:
    """Right-handed orthonormal triple ``(a, b, pole)`` with ``a × b = pole``.

    A beam built on this frame concentrates on the great circle spanned by
    ``a`` and ``b`` and propagates from ``a`` towards ``b``.
    """

    a: np.ndarray
    b: np.ndarray
    pole: np.ndarray

    def matrix(self) -> np.ndarray:
        """Rows ``a, b, pole``; maps global coordinates to frame coordinates."""
        return np.vstack([self.a, self.b, self.pole])

    def rotated(self, alpha: float) -> "Frame":
        """Frame turned by ``alpha`` about its pole.

        A degree-k beam on the rotated frame equals ``exp(i k alpha)`` times
        the beam on this frame.
        """
        c, s = math.cos(alpha), math.sin(alpha)
        return Frame(c * self.a - s * self.b, s * self.a + c * self.b, self.pole)

    def orthonormality_error(self) -> float:
        m = self.matrix()
        err = np.abs(m @ m.T - np.eye(3)).max()
        return float(max(err, np.abs(np.cross(self.a, self.b) - self.pole).max()))


def canonical_frame(p) -> Frame:
    """Deterministic frame with ``pole = p``.

    ``a`` and ``b`` are the images of ``e1`` and ``e2`` under the minimal
    rotation taking ``e3`` to ``p``.  At ``p = -e3`` (where that rotation is
    undefined) the frame is ``((1, 0, 0), (0, -1, 0), (0, 0, -1))``.
    """
    p = np.asarray(p, dtype=float)
    nrm = np.linalg.norm(p)
    if abs(nrm - 1.0) > 1e-9:
        raise ValueError(f"pole must be a unit vector, |p| = {nrm!r}")
    p = p / nrm
    x, y, z = p
    rho = math.hypot(x, y)
    if rho == 0.0:
        a = np.array([1.0, 0.0, 0.0])
        return Frame(a, np.cross(p, a), p)
    if z >= 0:
        h = 1.0 / (1.0 + z)
        xx, xy = x * x * h, x * y * h
    else:
        # 1/(1+z) = (1-z)/rho^2, written with the unit direction (x, y)/rho
        ux, uy = x / rho, y / rho
        xx, xy = ux * ux * (1.0 - z), ux * uy * (1.0 - z)
    a = np.array([1.0 - xx, -xy, -x])
    a -= (a @ p) * p
    a /= np.linalg.norm(a)
    b = np.cross(p, a)
    return Frame(a, b, p)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Haar-random rotation matrix (QR of a Gaussian matrix, det +1)."""
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


# --------------------------------------------------------------------------
# pole sets


@dataclass(frozen=True)
class PoleSet:
    """``m`` unit vectors with their minimal pairwise separation.

    ``D`` and ``k`` are recorded when the set was sized from a density and a
    degree (``m = floor(D (2k + 1))``); ``seed`` when it was generated.
    """

    poles: np.ndarray
    d_min: float
    D: float | None = None
    k: int | None = None
    seed: int | None = None

    def __post_init__(self):
        self.poles.setflags(write=False)

    @property
    def m(self) -> int:
        return len(self.poles)

    @classmethod
    def from_points(cls, points, **meta) -> "PoleSet":
        pts = _as_unit(np.array(points, dtype=float).reshape(-1, 3))
        return cls(pts, min_separation(pts), **meta)

    def frames(self) -> list[Frame]:
        return [canonical_frame(p) for p in self.poles]


def fibonacci_lattice(m: int) -> np.ndarray:
    """Golden-angle spiral with ``m`` points at equal-area latitudes."""
    i = np.arange(m) + 0.5
    z = 1.0 - 2.0 * i / m
    rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = math.pi * (3.0 - math.sqrt(5.0)) * np.arange(m)
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def _refine(points: np.ndarray, sweeps: int) -> np.ndarray:
    """Farthest-point repulsion: each pole steps away from its nearest
    neighbour along the sphere; a step is kept only if it enlarges that
    pole's own nearest distance, so the global minimum never decreases."""
    x = points.copy()
    m = len(x)
    if m < 2:
        return x
    etas = np.geomspace(0.5, 1e-3, sweeps)
    # nearest neighbour by largest dot product; acos is monotone
    for eta in etas:
        for i in range(m):
            dots = x @ x[i]
            dots[i] = -np.inf
            j = int(np.argmax(dots))
            g = x[i] - x[j]
            g -= (g @ x[i]) * x[i]
            gn = np.linalg.norm(g)
            if gn < 1e-15:
                continue
            step = eta * math.acos(min(1.0, dots[j]))
            trial = math.cos(step) * x[i] + math.sin(step) * (g / gn)
            trial /= np.linalg.norm(trial)
            new = x @ trial
            new[i] = -np.inf
            if new.max() < dots[j]:
                x[i] = trial
    return x


def generate_poles(m: int, seed: int = 0, sweeps: int = REFINE_SWEEPS) -> PoleSet:
    """Roughly evenly separated poles.

    A Fibonacci lattice, rotated by a seeded random rotation, followed by
    ``sweeps`` farthest-point repulsion sweeps.  Deterministic for fixed
    ``(m, seed, sweeps)``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    rng = np.random.default_rng(seed)
    pts = fibonacci_lattice(m) @ random_rotation(rng).T
    pts = _as_unit(_refine(pts, sweeps))
    return PoleSet(pts, min_separation(pts), seed=seed)


def density_count(D: float, k: int) -> int:
    """``floor(D (2k + 1))``, guarded against round-off just below an integer."""
    if not 0 < D < 1:
        raise ValueError("density must satisfy 0 < D < 1")
    return int(math.floor(D * (2 * k + 1) + 1e-9))


def build_poles(D: float, k: int, seed: int = 0) -> PoleSet:
    m = density_count(D, k)
    if m < 1:
        raise ValueError(f"density {D} at degree {k} gives no poles")
    ps = generate_poles(m, seed)
    return PoleSet(ps.poles, ps.d_min, D=D, k=k, seed=seed)


@dataclass(frozen=True)
class SeparationReport:
    d_min: float
    lower: float
    upper: float
    passed: bool
    degenerate: bool = False


def check_separation(ps: PoleSet) -> SeparationReport:
    """Check ``1/sqrt(m) <= d_min <= 6/sqrt(m)``.

    Sets with fewer than two poles pass vacuously and are flagged
    ``degenerate``.
    """
    m = ps.m
    if m < 2:
        return SeparationReport(ps.d_min, 1.0, 6.0, True, degenerate=True)
    lo, hi = 1.0 / math.sqrt(m), 6.0 / math.sqrt(m)
    return SeparationReport(ps.d_min, lo, hi, bool(lo <= ps.d_min <= hi))


# --------------------------------------------------------------------------
# strips


def build_delta(d: float) -> float:
    """Strip width ``pi / ceil(pi / d)``; lies in ``[d/2, d]``."""
    if not 0 < d <= math.pi:
        raise ValueError("d must lie in (0, pi]")
    n = math.ceil(math.pi / d - 1e-12)
    return math.pi / n


@dataclass(frozen=True)
class StripPartition:
    delta: float
    n_strips: int
    counts: np.ndarray  # counts[l - 1] is the tally of strip l

    def __post_init__(self):
        self.counts.setflags(write=False)


def strip_counts(ps: PoleSet, i: int, delta: float) -> StripPartition:
    """Tally the other poles by strip around pole ``i``.

    Strip ``l`` (1-based) holds poles at angle in ``((l-1) delta, l delta]``;
    pole ``i`` itself is excluded.
    """
    if not 0 < delta <= math.pi:
        raise ValueError("delta must lie in (0, pi]")
    n = max(1, math.ceil(math.pi / delta - 1e-12))
    counts = np.zeros(n, dtype=int)
    if ps.m > 1:
        ang = np.delete(angles_from(ps.poles[i], ps.poles), i)
        idx = np.ceil(ang / delta - 1e-12).astype(int)
        idx = np.clip(idx, 1, n)
        np.add.at(counts, idx - 1, 1)
    return StripPartition(delta, n, counts)


# --------------------------------------------------------------------------
# text format


def save_poles(ps: PoleSet, path) -> None:
    """One pole per line, header ``# m=<m> seed=<seed> d_min=<v>``."""
    lines = [f"# m={ps.m} seed={ps.seed} d_min={ps.d_min!r}"]
    lines += [" ".join(repr(float(c)) for c in p) for p in ps.poles]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_poles(path) -> PoleSet:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    meta = {}
    if text and text[0].startswith("#"):
        for tok in text[0][1:].split():
            key, _, val = tok.partition("=")
            meta[key] = val
        text = text[1:]
    pts = np.array([[float(v) for v in ln.split()] for ln in text if ln.strip()])
    seed = meta.get("seed")
    seed = None if seed in (None, "None") else int(seed)
    ps = PoleSet.from_points(pts.reshape(-1, 3), seed=seed)
    if "m" in meta and int(meta["m"]) != ps.m:
        raise ValueError(f"header says m={meta['m']} but file holds {ps.m} poles")
    return ps
