"""Command-line driver.

    beamortho construct --k 512 --density 0.02 --p 4 --out run.json
    beamortho sweep --k-list 64,128,256,512 --density 0.02 --p 4,6,inf
    beamortho verify
    beamortho gram --k 2000 --density 0.0025 --matrix E.txt
    beamortho localize --k 2000 --density 0.0025 --c 0.5,1,2

Exit status: 0 all checks pass, 1 a check failed, 2 usage error,
3 numeric or resource error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from .gram import save_matrix
from .linalg import NotPositiveDefinite
from .ortho import ReconciliationError
from .pipeline import (
    REPORT_VERSION,
    ExperimentConfig,
    run_construct,
    run_gram,
    run_localize,
    run_sweep,
    run_verify,
)
from .quad import GridTooLarge

log = logging.getLogger("beamortho")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

# fixed CSV layouts, one per report kind
CSV_COLUMNS = {
    "construct": ["p", "i", "norm", "beam_norm", "baseline", "margin", "chain_bound", "headline_ok", "chain_ok"],
    "localize": ["c", "i", "w", "mass_in", "mass_out", "norm2", "beam_mass_in", "epsilon",
                 "bound_in", "bound_out", "in_applicable", "in_ok", "out_ok", "passed"],
    "verify": ["check", "value", "tol", "passed"],
    "gram": ["i", "row_sum"],
}


def _floats(text: str) -> tuple:
    return tuple(t.strip() for t in text.split(",") if t.strip())


def _ints(text: str) -> tuple:
    return tuple(int(t) for t in text.split(",") if t.strip())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file with ExperimentConfig fields; flags win")
    common.add_argument("--k", type=int, help="degree")
    common.add_argument("--k-list", type=_ints, help="comma-separated degrees for a sweep")
    common.add_argument("--density", type=float, help="density D, m = floor(D (2k+1))")
    common.add_argument("--m", type=int, help="explicit number of beams (overrides the density count)")
    common.add_argument("--p", type=_floats, help="comma-separated exponents, 'inf' allowed")
    common.add_argument("--c", type=_floats, help="comma-separated tube constants, w = c/sqrt(k)")
    common.add_argument("--seed", type=int)
    common.add_argument("--grid-scale", type=float)
    common.add_argument("--tol", type=float, help="series truncation tolerance")
    common.add_argument("--out", type=Path, help="report file (stdout when omitted)")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--timings", action="store_true", default=None, help="add wall-clock timings to the report")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="beamortho", description="Orthonormal beam families on the sphere.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("construct", parents=[common], help="build and check one family")
    sub.add_parser("sweep", parents=[common], help="fit norm growth over a list of degrees")
    sub.add_parser("verify", parents=[common], help="run the oracle cross-checks")
    g = sub.add_parser("gram", parents=[common], help="poles and Gram matrix only")
    g.add_argument("--matrix", type=Path, help="write the Gram matrix in text form")
    sub.add_parser("localize", parents=[common], help="tube masses of the orthonormal family")
    return ap


def config_from_args(args) -> ExperimentConfig:
    base = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    return base.with_overrides(
        k=args.k,
        k_list=args.k_list,
        density=args.density,
        m=args.m,
        p=args.p,
        c=args.c,
        seed=args.seed,
        grid_scale=args.grid_scale,
        tol=args.tol,
        timings=args.timings,
    )


def _csv_rows(report: dict):
    kind = report["kind"]
    if kind == "construct":
        return report["norm_table"]
    if kind == "localize":
        return report["localization"]
    if kind == "verify":
        return report["checks"]
    if kind == "gram":
        return [{"i": i, "row_sum": v} for i, v in enumerate(report["row_sums"])]
    return report["rows"]


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    rows = _csv_rows(report)
    if report["kind"] == "sweep":
        cols = list(rows[0]) if rows else ["k"]
    else:
        cols = CSV_COLUMNS[report["kind"]]
    buf = io.StringIO()
    buf.write(f"# beamortho {report['kind']} v{REPORT_VERSION} passed={report['passed']}\n")
    w = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
        if args.command in ("construct", "gram", "localize"):
            cfg.validate()
        elif args.command == "sweep":
            cfg.validate(sweep=True)
    except (ValueError, TypeError, OSError) as exc:
        ap.error(str(exc))  # exits with status 2
    try:
        if args.command == "construct":
            report = run_construct(cfg)
        elif args.command == "sweep":
            report = run_sweep(cfg)
        elif args.command == "verify":
            report = run_verify(cfg)
        elif args.command == "gram":
            report, E = run_gram(cfg)
            if args.matrix:
                save_matrix(E, args.matrix)
        else:
            report = run_localize(cfg)
    except (NotPositiveDefinite, ReconciliationError, GridTooLarge, MemoryError, FloatingPointError, ArithmeticError) as exc:
        err = {"kind": args.command, "version": REPORT_VERSION, "config": cfg.echo(),
               "error": {"type": type(exc).__name__, "message": str(exc)}, "passed": False}
        _emit(json.dumps(err, indent=2) + "\n", args.out)
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_NUMERIC
    _emit(render(report, args.format), args.out)
    if not report["passed"]:
        failed = report.get("failed")
        log.error("checks failed%s", f": {', '.join(failed)}" if failed else "")
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
