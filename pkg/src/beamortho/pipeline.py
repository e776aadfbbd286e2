"""End-to-end runs: poles, beams, Gram matrix, orthonormalization, norm and
localization checks, gathered into plain-dict reports."""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .beams import make_beam, north_beam
from .gram import (
    build_gram,
    density_condition,
    density_lhs,
    gershgorin_certificate,
    gram_entry,
    theoretical_r,
)
from .linalg import inv_sqrt_eigen, inv_sqrt_series, matrix_inf_norm, max_entry
from .localize import beam_localization, ortho_localization
from .ortho import (
    average_bound_check,
    f_bounds_check,
    lp_table,
    orthonormalize,
    verify_corollary_scaling,
    verify_lp_lower_bound,
)
from .quad import build_grid, inner_product, integral_identity_check
from .sphere import Frame, PoleSet, build_poles, check_separation, generate_poles, random_rotation

__all__ = [
    "ExperimentConfig",
    "REPORT_VERSION",
    "beam_pair_oracle",
    "gram_summary",
    "hermitian_oracle",
    "integral_identity_suite",
    "run_construct",
    "run_gram",
    "run_localize",
    "run_sweep",
    "run_verify",
]

REPORT_VERSION = 1

ORTHO_TOL = 1e-9
FEF_TOL = 1e-10
EIG_TOL = 1e-10
SLOPE_TOL = 0.02


@dataclass(frozen=True)
class ExperimentConfig:
    k: int | None = None
    k_list: tuple = ()
    density: float | None = None
    m: int | None = None
    p: tuple = (4.0,)
    seed: int = 0
    grid_scale: float = 1.0
    tol: float = 1e-12
    rtol: float = 1e-6
    c: tuple = (1.0,)
    quad_check: bool = True
    localize: bool = True
    timings: bool = False

    def __post_init__(self):
        object.__setattr__(self, "k_list", tuple(int(k) for k in self.k_list))
        object.__setattr__(self, "p", tuple(_parse_p(p) for p in self.p))
        object.__setattr__(self, "c", tuple(float(c) for c in self.c))

    def validate(self, sweep: bool = False) -> None:
        if self.density is not None and not 0 < self.density < 1:
            raise ValueError("density must satisfy 0 < D < 1")
        if self.density is None and self.m is None:
            raise ValueError("give a density or an explicit m")
        if self.m is not None and self.m < 1:
            raise ValueError("m must be >= 1")
        ks = self.k_list if sweep else (self.k,)
        if sweep and len(ks) < 3:
            raise ValueError("a sweep needs at least three degrees")
        for k in ks:
            if k is None or k < 0:
                raise ValueError("degree k must be given and >= 0")
            if k == 0 and self.m != 1:
                raise ValueError("degree 0 admits a single function (use m=1)")
        if any(p < 1 for p in self.p):
            raise ValueError("p must be >= 1")
        if self.grid_scale <= 0 or any(c <= 0 for c in self.c):
            raise ValueError("grid_scale and c must be positive")

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def echo(self) -> dict:
        return _clean(asdict(self))


def _parse_p(p) -> float:
    if isinstance(p, str) and p.strip().lower() in ("inf", "infinity"):
        return math.inf
    return float(p)


def _clean(x):
    """JSON-safe copy: numpy scalars to Python, infinities to ``"inf"``."""
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_clean(v) for v in x.tolist()]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    return x


class _Clock:
    def __init__(self):
        self.marks: dict[str, float] = {}
        self._t = time.perf_counter()

    def lap(self, name: str) -> None:
        now = time.perf_counter()
        self.marks[name] = now - self._t
        self._t = now


# --------------------------------------------------------------------------
# construction


def _poles(cfg: ExperimentConfig, k: int) -> PoleSet:
    if cfg.m is not None:
        ps = generate_poles(cfg.m, cfg.seed)
        return PoleSet(ps.poles, ps.d_min, D=cfg.density, k=k, seed=cfg.seed)
    return build_poles(cfg.density, k, cfg.seed)


def gram_summary(ps: PoleSet, k: int, clock: _Clock | None = None):
    beams = [make_beam(k, f) for f in ps.frames()]
    G = build_gram(beams)
    cert = gershgorin_certificate(G, EIG_TOL)
    sep = check_separation(ps)
    section = {
        "poles": {
            "m": ps.m,
            "d_min": ps.d_min,
            "lower": sep.lower,
            "upper": sep.upper,
            "degenerate": sep.degenerate,
            "passed": sep.passed,
        },
        "gram": {
            "r_emp": G.r_emp,
            "row_sum_max": G.r_emp,
            "dominant": cert.dominant,
            "eig_min": float(cert.eigenvalues.min()),
            "eig_max": float(cert.eigenvalues.max()),
            "interval": list(cert.interval),
            "containment_tol": EIG_TOL,
            "containment": cert.eig_check,
            "passed": cert.dominant and cert.eig_check,
        },
    }
    if clock:
        clock.lap("gram")
    return beams, G, section


def _theory(cfg: ExperimentConfig, k: int, r_emp: float) -> dict | None:
    if cfg.density is None or k < 1:
        return None
    t = theoretical_r(cfg.density, k)
    r12 = t.groupI + t.groupII
    return {
        "D": t.D,
        "k": t.k,
        "c0": t.c0,
        "groupI": t.groupI,
        "groupII": t.groupII,
        "groupIII": t.groupIII,
        "r_theory": t.r_theory,
        "admissible": t.admissible,
        "density_lhs": density_lhs(cfg.density),
        "density_condition": density_condition(cfg.density),
        "r_groups_I_II": r12,
        "r_emp_within": r_emp <= r12,
    }


def _f_section(os, fb) -> dict:
    return {
        "diag_min": os.f_diag_range[0],
        "diag_max": os.f_diag_range[1],
        "row_sum_max": float(os.f_row_sums.max()),
        "H_norm": os.H_norm,
        "fef_error": os.fef_error,
        "fef_tol": FEF_TOL,
        "series_terms": os.series_terms,
        "series_discrepancy": os.series_discrepancy,
        "ortho_error": os.ortho_error,
        "ortho_tol": ORTHO_TOL,
        "r": fb.r,
        "weak_applicable": fb.weak_applicable,
        "weak_passed": bool(fb.weak_diag_ok.all() and fb.weak_rows_ok.all()),
        "strong_applicable": fb.strong_applicable,
        "strong_passed": None if fb.strong_diag_ok is None else bool(fb.strong_diag_ok.all() and fb.strong_rows_ok.all()),
        "passed": fb.passed and os.fef_error <= FEF_TOL and (os.ortho_error is None or os.ortho_error <= ORTHO_TOL),
    }


def _norm_sections(cfg, os, table):
    rows, summary = [], []
    for p in table.ps:
        rep = verify_lp_lower_bound(os, p, table=table)
        for i in range(os.m):
            rows.append({
                "p": p,
                "i": i,
                "norm": rep.norms[i],
                "beam_norm": None if rep.beam_norms is None else rep.beam_norms[i],
                "baseline": rep.baseline,
                "margin": rep.margins[i],
                "chain_bound": rep.chain_bounds[i],
                "headline_ok": bool(rep.headline_ok[i]),
                "chain_ok": bool(rep.chain_ok[i]),
            })
        entry = {
            "p": p,
            "min_norm": float(rep.norms.min()),
            "baseline": rep.baseline,
            "min_margin": float(rep.margins.min()),
            "half_baseline": 0.5 * rep.baseline,
            "bound_applicable": rep.bound_applicable,
            "doubling_estimate": rep.estimate,
            "rtol": cfg.rtol,
            "passed": rep.passed,
        }
        if cfg.density is not None:
            lhs, rhs, ok = average_bound_check(os, table, p, cfg.density)
            entry.update(average_lhs=lhs, average_rhs=rhs, average_ok=ok)
            entry["passed"] = entry["passed"] and (ok or not rep.bound_applicable)
        summary.append(entry)
    return rows, summary


def _localization_rows(os, cs) -> list[dict]:
    if os.k < 1:
        return []
    grid = build_grid(2 * os.k)
    rows = []
    for c in cs:
        for i in range(os.m):
            r = ortho_localization(os, i, c, grid)
            rows.append({
                "c": r.c,
                "i": r.i,
                "w": r.w,
                "mass_in": r.mass_in,
                "mass_out": r.mass_out,
                "norm2": r.norm2,
                "beam_mass_in": r.beam_mass_in,
                "epsilon": r.epsilon,
                "bound_in": r.bound_in,
                "bound_out": r.bound_out,
                "in_applicable": r.in_applicable,
                "in_ok": r.in_ok,
                "out_ok": r.out_ok,
                "triangle_bound": r.triangle_bound,
                "triangle_ok": r.triangle_ok,
                "passed": r.passed,
            })
    return rows


def _finish(report: dict, clock: _Clock, cfg: ExperimentConfig) -> dict:
    if cfg.timings:
        report["timings"] = clock.marks
    return _clean(report)


def run_construct(cfg: ExperimentConfig) -> dict:
    """Full pipeline at one degree; ``report["passed"]`` is the overall flag."""
    cfg.validate()
    clock = _Clock()
    k = cfg.k
    ps = _poles(cfg, k)
    clock.lap("poles")
    beams, G, section = gram_summary(ps, k, clock)
    os = orthonormalize(beams, G, tol=cfg.tol, quad_check=cfg.quad_check, fef_tol=FEF_TOL)
    fsec = _f_section(os, f_bounds_check(os))
    clock.lap("orthonormalize")
    table = lp_table(os, cfg.p, rtol=cfg.rtol, grid_scale=cfg.grid_scale)
    rows, summary = _norm_sections(cfg, os, table)
    clock.lap("norms")
    loc = _localization_rows(os, cfg.c) if cfg.localize else []
    clock.lap("localization")
    theory = _theory(cfg, k, G.r_emp)
    checks = [section["poles"]["passed"], section["gram"]["passed"], fsec["passed"]]
    checks += [s["passed"] for s in summary] + [r["passed"] for r in loc]
    if theory is not None and theory["admissible"]:
        checks.append(theory["r_emp_within"])
    report = {
        "kind": "construct",
        "version": REPORT_VERSION,
        "config": cfg.echo(),
        "k": k,
        **section,
        "f": fsec,
        "norms": summary,
        "norm_table": rows,
        "localization": loc,
        "theory": theory,
        "passed": all(checks),
    }
    return _finish(report, clock, cfg)


def run_gram(cfg: ExperimentConfig) -> tuple[dict, np.ndarray]:
    """Poles and Gram matrix only; returns the report and ``E``."""
    cfg.validate()
    clock = _Clock()
    ps = _poles(cfg, cfg.k)
    clock.lap("poles")
    _, G, section = gram_summary(ps, cfg.k, clock)
    theory = _theory(cfg, cfg.k, G.r_emp)
    report = {
        "kind": "gram",
        "version": REPORT_VERSION,
        "config": cfg.echo(),
        "k": cfg.k,
        **section,
        "row_sums": G.row_sums,
        "theory": theory,
        "passed": section["poles"]["passed"] and section["gram"]["passed"],
    }
    return _finish(report, clock, cfg), G.E


def run_localize(cfg: ExperimentConfig) -> dict:
    """Tube masses of every ``u_i`` for each ``c``, plus the single-beam
    profile against ``erf(c)``."""
    cfg.validate()
    if cfg.k < 1:
        raise ValueError("localization needs k >= 1")
    clock = _Clock()
    ps = _poles(cfg, cfg.k)
    beams, G, section = gram_summary(ps, cfg.k, clock)
    os = orthonormalize(beams, G, tol=cfg.tol, quad_check=False, fef_tol=FEF_TOL)
    clock.lap("orthonormalize")
    loc = _localization_rows(os, cfg.c)
    grid = build_grid(2 * cfg.k)
    profile = []
    for c in cfg.c:
        b = beam_localization(north_beam(cfg.k), c, grid)
        profile.append({"c": c, "w": b.w, "mass_in": b.mass_in, "erf": math.erf(c), "deviation": b.mass_in - math.erf(c)})
    clock.lap("localization")
    report = {
        "kind": "localize",
        "version": REPORT_VERSION,
        "config": cfg.echo(),
        "k": cfg.k,
        **section,
        "localization": loc,
        "profile": profile,
        "passed": section["gram"]["passed"] and all(r["passed"] for r in loc),
    }
    return _finish(report, clock, cfg)


# --------------------------------------------------------------------------
# sweep


def run_sweep(cfg: ExperimentConfig) -> dict:
    """Degree sweep at fixed density; fits the growth exponent of
    ``min_i ||u_i||_p`` and of ``||Q_k||_p`` for each ``p``."""
    cfg.validate(sweep=True)
    clock = _Clock()
    ks = sorted(cfg.k_list)
    rows = []
    mins = {p: [] for p in cfg.p}
    refs = {p: [] for p in cfg.p}
    ok = True
    for k in ks:
        ps = _poles(cfg, k)
        beams, G, section = gram_summary(ps, k)
        os = orthonormalize(beams, G, tol=cfg.tol, quad_check=cfg.quad_check, fef_tol=FEF_TOL)
        fsec = _f_section(os, f_bounds_check(os))
        table = lp_table(os, cfg.p, rtol=cfg.rtol, grid_scale=cfg.grid_scale, with_beams=False)
        row = {"k": k, "m": ps.m, "r_emp": G.r_emp, "d_min": ps.d_min}
        for n, p in enumerate(table.ps):
            mins[p].append(float(table.u[n].min()))
            refs[p].append(float(table.reference[n]))
            row[f"norm_p{_p_label(p)}"] = mins[p][-1]
            row[f"baseline_p{_p_label(p)}"] = refs[p][-1]
        ok &= section["gram"]["passed"] and fsec["passed"]
        rows.append(row)
        clock.lap(f"k={k}")
    slopes = []
    for p in cfg.p:
        s = verify_corollary_scaling(ks, mins[p], p, SLOPE_TOL)
        b = verify_corollary_scaling(ks, refs[p], p, SLOPE_TOL)
        slopes.append({
            "p": p,
            "target": s.target,
            "slope": s.slope,
            "residuals": list(s.residuals),
            "baseline_slope": b.slope,
            "tol": SLOPE_TOL,
            "passed": s.passed,
        })
        ok &= s.passed
    report = {
        "kind": "sweep",
        "version": REPORT_VERSION,
        "config": cfg.echo(),
        "rows": rows,
        "slopes": slopes,
        "passed": bool(ok),
    }
    return _finish(report, clock, cfg)


def _p_label(p: float) -> str:
    return "inf" if math.isinf(p) else f"{p:g}"


# --------------------------------------------------------------------------
# oracle suite


def _random_frame(rng: np.random.Generator) -> Frame:
    R = random_rotation(rng)
    return Frame(R[0], R[1], R[2])


def beam_pair_oracle(k: int, pairs: int = 20, seed: int = 0) -> float:
    """Worst gap between the closed-form inner product and quadrature over
    seeded random beam pairs."""
    rng = np.random.default_rng([seed, k])
    grid = build_grid(2 * k)
    worst = 0.0
    for _ in range(pairs):
        b1 = make_beam(k, _random_frame(rng))
        b2 = make_beam(k, _random_frame(rng))
        worst = max(worst, abs(gram_entry(b1, b2) - inner_product(b1, b2, grid)))
    return worst


def hermitian_oracle(n_mats: int = 100, seed: int = 0, max_order: int = 12, bound: float = 0.5, tol: float = 1e-12):
    """Eigen vs series ``E^{-1/2}`` and Geršgorin containment on random
    ``E = I + B`` with zero-diagonal Hermitian ``B``, ``|||B||| <= bound``.

    Returns ``(worst F discrepancy, worst containment excess)``.
    """
    rng = np.random.default_rng(seed)
    worst_f = worst_g = 0.0
    for _ in range(n_mats):
        n = int(rng.integers(1, max_order + 1))
        B = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        B = B + B.conj().T
        np.fill_diagonal(B, 0.0)
        nb = matrix_inf_norm(B)
        if nb > 0:
            B *= bound * rng.uniform(0.05, 1.0) / nb
        E = np.eye(n) + B
        Fs, _ = inv_sqrt_series(E, tol)
        worst_f = max(worst_f, max_entry(inv_sqrt_eigen(E) - Fs))
        cert = gershgorin_certificate(E)
        lo, hi = cert.interval
        excess = max(0.0, lo - cert.eigenvalues.min(), cert.eigenvalues.max() - hi)
        worst_g = max(worst_g, excess)
    return worst_f, worst_g


def integral_identity_suite(k_max: int = 200) -> float:
    """Worst error of the identity integral over ``k = 0 .. k_max``."""
    return max(abs(integral_identity_check(k) - 2.0 / (k + 1)) for k in range(k_max + 1))


@dataclass
class _Suite:
    rows: list = field(default_factory=list)

    def add(self, name: str, value: Any, tol: Any, passed: bool) -> None:
        self.rows.append({"check": name, "value": value, "tol": tol, "passed": bool(passed)})


def run_verify(cfg: ExperimentConfig | None = None, gram_ks: Sequence[int] = (8, 16, 32, 64)) -> dict:
    """Oracle cross-checks of every module; names the failing ones."""
    cfg = cfg or ExperimentConfig(density=1 / 400)
    clock = _Clock()
    s = _Suite()
    for k in gram_ks:
        err = beam_pair_oracle(k, 20, cfg.seed)
        s.add(f"gram_vs_quadrature_k{k}", err, 1e-9, err <= 1e-9)
    clock.lap("gram_oracle")
    fd, ge = hermitian_oracle(100, cfg.seed)
    s.add("eigen_vs_series", fd, 1e-8, fd <= 1e-8)
    s.add("gershgorin_containment", ge, EIG_TOL, ge <= EIG_TOL)
    clock.lap("linalg_oracle")
    ie = integral_identity_suite(200)
    s.add("integral_identity", ie, 1e-12, ie <= 1e-12)
    lhs = density_lhs(1 / 400)
    s.add("density_condition_1_400", lhs, 1 / 25, density_condition(1 / 400))
    s.add("density_condition_1_2_fails", density_lhs(0.5), 1 / 25, not density_condition(0.5))
    clock.lap("constants")
    failed = [r["check"] for r in s.rows if not r["passed"]]
    report = {
        "kind": "verify",
        "version": REPORT_VERSION,
        "config": cfg.echo(),
        "checks": s.rows,
        "failed": failed,
        "passed": not failed,
    }
    return _finish(report, clock, cfg)
