"""Orthonormal families of high-degree spherical harmonics built from
Gaussian beams, with numerical certificates for their L^p size."""

from .beams import GaussianBeam, beam_values, corollary_exponent, make_beam, north_beam, normalization_constant, sigma
from .gram import build_gram, density_condition, gershgorin_certificate, gram_entry, theoretical_r
from .linalg import NotPositiveDefinite, inv_sqrt_eigen, inv_sqrt_series, matrix_inf_norm
from .localize import beam_localization, ortho_localization
from .ortho import OrthoSet, f_bounds_check, lp_table, ortho_eval, orthonormalize, verify_lp_lower_bound
from .pipeline import ExperimentConfig, run_construct, run_sweep, run_verify
from .quad import build_grid, lp_norm, lp_norms
from .sphere import Frame, PoleSet, build_poles, canonical_frame, generate_poles

__version__ = "0.1.0"

__all__ = [
    "ExperimentConfig",
    "Frame",
    "GaussianBeam",
    "NotPositiveDefinite",
    "OrthoSet",
    "PoleSet",
    "beam_localization",
    "beam_values",
    "build_grid",
    "build_gram",
    "build_poles",
    "canonical_frame",
    "corollary_exponent",
    "density_condition",
    "f_bounds_check",
    "generate_poles",
    "gershgorin_certificate",
    "gram_entry",
    "inv_sqrt_eigen",
    "inv_sqrt_series",
    "lp_norm",
    "lp_norms",
    "lp_table",
    "make_beam",
    "matrix_inf_norm",
    "normalization_constant",
    "north_beam",
    "ortho_eval",
    "ortho_localization",
    "orthonormalize",
    "run_construct",
    "run_sweep",
    "run_verify",
    "sigma",
    "theoretical_r",
    "verify_lp_lower_bound",
]
