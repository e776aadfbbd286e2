"""L2 mass of beams and of the orthonormalized functions inside and outside
geodesic tubes of half-width ``w = c k^{-1/2}`` around the beams' great
circles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .beams import GaussianBeam, beam_values
from .ortho import F_PRUNE, OrthoSet
from .quad import SphereGrid, build_grid, tube_mass

__all__ = [
    "BeamLocalization",
    "LocalizationReport",
    "beam_localization",
    "gaussian_profile_mass",
    "ortho_localization",
    "tube_width",
]

BOUND_IN = 1.0 / 8.0
# roundoff allowance on the mass bounds
SLACK = 1e-12


def tube_width(c: float, k: int) -> float:
    """``w = c / sqrt(k)``, capped at ``pi/2`` (the whole sphere)."""
    if c <= 0:
        raise ValueError("c must be positive")
    if k < 1:
        raise ValueError("degree must be >= 1")
    return min(c / math.sqrt(k), math.pi / 2)


def gaussian_profile_mass(c: float) -> float:
    """Large-``k`` limit of the beam mass inside ``w = c k^{-1/2}``."""
    return math.erf(c)


def _grid(grid, k):
    return build_grid(2 * k) if grid is None else grid


@dataclass(frozen=True)
class BeamLocalization:
    k: int
    w: float
    mass_in: float
    mass_out: float
    under_resolved: bool


class _Columns:
    """``u_i`` and ``q_i`` as two columns, evaluating only the beams that
    enter row ``i`` of ``F``."""

    def __init__(self, os: OrthoSet, i: int):
        row = os.F[i]
        idx = [j for j in range(os.m) if j == i or abs(row[j]) >= F_PRUNE]
        self.beams = [os.beams[j] for j in idx]
        self.coef = row[idx]
        self.pos = idx.index(i)
        self.degree = os.k
        self.n_funcs = len(idx) + 2

    def __call__(self, y):
        q = beam_values(self.beams, y)
        return np.column_stack([q @ self.coef, q[:, self.pos]])


def beam_localization(beam: GaussianBeam, c: float, grid: SphereGrid | None = None) -> BeamLocalization:
    """Mass of ``beam`` in its own tube; the grid defaults to degree ``2k``."""
    w = tube_width(c, beam.k)
    g = _grid(grid, beam.k)
    fn = lambda y: beam_values([beam], y)  # noqa: E731
    fn.degree = beam.k
    tm = tube_mass(fn, beam.frame, w, g)
    return BeamLocalization(beam.k, w, float(tm.inside[0]), float(tm.outside[0]), tm.under_resolved)


@dataclass(frozen=True)
class LocalizationReport:
    k: int
    i: int
    c: float
    w: float
    r: float
    mass_in: float
    mass_out: float
    norm2: float
    beam_mass_in: float
    epsilon: float
    bound_in: float
    bound_out: float
    in_applicable: bool
    in_ok: bool
    out_ok: bool
    triangle_bound: float
    triangle_ok: bool
    under_resolved: bool

    @property
    def passed(self) -> bool:
        return (self.in_ok or not self.in_applicable) and self.out_ok and self.triangle_ok and not self.under_resolved


def ortho_localization(os: OrthoSet, i: int, c: float, grid: SphereGrid | None = None) -> LocalizationReport:
    """Tube masses of ``u_i`` next to those of ``q_i``.

    ``epsilon`` is the measured beam mass outside the tube.  The lower bound
    ``mass_in >= 1/8`` is asserted when ``r <= 1/24`` and the beam keeps at
    least half its mass inside; the outside bound ``(1 + 6r) epsilon + 6r``
    and the triangle bound on ``|mass_in(u_i) - mass_in(q_i)|`` always.
    """
    if not 0 <= i < os.m:
        raise IndexError(f"index {i} out of range for {os.m} functions")
    k = os.k
    w = tube_width(c, k)
    g = _grid(grid, k)
    tm = tube_mass(_Columns(os, i), os.beams[i].frame, w, g)
    u_in, q_in = (float(x) for x in tm.inside)
    u_out, q_out = (float(x) for x in tm.outside)
    r = os.r_emp
    s = 6.0 * r
    bound_out = (1.0 + s) * q_out + s
    tri = 2.0 * (1.0 + s) * s + s * s
    in_app = r <= 1.0 / 24.0 and q_in >= 0.5
    return LocalizationReport(
        k=k,
        i=i,
        c=float(c),
        w=w,
        r=r,
        mass_in=u_in,
        mass_out=u_out,
        norm2=u_in + u_out,
        beam_mass_in=q_in,
        epsilon=q_out,
        bound_in=BOUND_IN,
        bound_out=bound_out,
        in_applicable=in_app,
        in_ok=u_in >= BOUND_IN,
        out_ok=u_out <= bound_out + SLACK,
        triangle_bound=tri,
        triangle_ok=abs(u_in - q_in) <= tri + SLACK,
        under_resolved=tm.under_resolved,
    )
