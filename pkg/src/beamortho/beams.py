"""Degree-k Gaussian beams (sectoral harmonics) on arbitrary frames.

A beam on the frame ``(a, b, pole)`` is the Cartesian polynomial

    q(y) = c_k ((a . y) + i (b . y))^k,

which in the frame's own polar coordinates reads ``c_k sin^k(phi) e^{ik theta}``.
The power is taken in modulus-argument form so that no associated Legendre
recurrence is needed and large ``k`` stays cheap; moduli below the double
range underflow silently to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .sphere import Frame, canonical_frame

__all__ = [
    "GaussianBeam",
    "beam_eval",
    "beam_values",
    "corollary_exponent",
    "make_beam",
    "north_beam",
    "normalization_constant",
    "sigma",
]


@lru_cache(maxsize=256)
def normalization_constant(k: int) -> float:
    """L2-normalizing constant ``c_k`` of ``sin^k(phi) e^{ik theta}``.

    ``c_k^2 = (2k+1)!! / (4 pi (2k)!!)``, accumulated as a compensated sum of
    ``log1p(1/(2j))`` so that no factorial is ever formed.
    """
    if k < 0:
        raise ValueError("degree must be non-negative")
    log_c2 = -math.log(4.0 * math.pi)
    if k:
        log_c2 += math.fsum(np.log1p(0.5 / np.arange(1, k + 1)))
    return math.exp(0.5 * log_c2)


@dataclass(frozen=True)
class GaussianBeam:
    k: int
    frame: Frame
    c_k: float

    @property
    def pole(self) -> np.ndarray:
        return self.frame.pole

    def __call__(self, y) -> np.ndarray:
        return beam_values([self], y)[..., 0]

    def phase_shifted(self, alpha: float) -> "GaussianBeam":
        """The beam multiplied by ``exp(i k alpha)``."""
        return GaussianBeam(self.k, self.frame.rotated(alpha), self.c_k)


def make_beam(k: int, frame: Frame) -> GaussianBeam:
    if k < 0:
        raise ValueError("degree must be non-negative")
    if frame.orthonormality_error() > 1e-10:
        raise ValueError("frame is not a right-handed orthonormal triple")
    return GaussianBeam(int(k), frame, normalization_constant(int(k)))


def north_beam(k: int) -> GaussianBeam:
    """``Q_k``: the beam on the equator with pole ``e3``."""
    return make_beam(k, canonical_frame([0.0, 0.0, 1.0]))


def beam_values(beams: Sequence[GaussianBeam], y, floor: float = 0.0) -> np.ndarray:
    """Evaluate a family of same-degree beams at points ``y`` (shape ``(..., 3)``).

    Returns an array of shape ``(..., len(beams))``.  Entries whose modulus
    is below ``floor * c_k`` are returned as exact zeros without computing
    the power; ``floor=0`` evaluates everything.
    """
    beams = list(beams)
    if not beams:
        raise ValueError("empty beam family")
    k = beams[0].k
    if any(b.k != k for b in beams):
        raise ValueError("all beams must share the same degree")
    y = np.asarray(y, dtype=float)
    shape = y.shape[:-1]
    y = y.reshape(-1, 3)
    c = beams[0].c_k
    if k == 0:
        return np.full(shape + (len(beams),), c, dtype=complex)
    A = np.array([b.frame.a for b in beams])
    B = np.array([b.frame.b for b in beams])
    re = y @ A.T
    im = y @ B.T
    r2 = re * re + im * im
    thr = floor ** (2.0 / k) if floor > 0 else 0.0
    mask = r2 > thr
    out = np.zeros(r2.shape, dtype=complex)
    lr = 0.5 * k * np.log(r2[mask])
    ph = k * np.arctan2(im[mask], re[mask])
    out[mask] = c * np.exp(lr + 1j * ph)
    return out.reshape(shape + (len(beams),))


def beam_eval(beam: GaussianBeam, y):
    """Value of ``beam`` at the unit vector ``y`` (or an array of them)."""
    v = beam(y)
    return complex(v) if np.ndim(v) == 0 else v


def sigma(p: float) -> float:
    """Sharp L^p eigenfunction exponent on a surface.

    ``(1/2)(1/2 - 1/p)`` for ``2 <= p <= 6`` and ``2(1/2 - 1/p) - 1/2`` for
    ``p >= 6``; both branches give 1/6 at the breakpoint.
    """
    if p < 2:
        raise ValueError("sigma(p) is defined for p >= 2")
    inv = 0.0 if math.isinf(p) else 1.0 / p
    if p <= 6:
        return 0.5 * (0.5 - inv)
    return 2.0 * (0.5 - inv) - 0.5


def corollary_exponent(p: float) -> float:
    """Growth exponent ``1/4 - 1/(2p)`` of beam-like sets for ``p >= 6``."""
    if p < 6:
        raise ValueError("use sigma(p) for p < 6")
    inv = 0.0 if math.isinf(p) else 1.0 / p
    return 0.25 - 0.5 * inv
