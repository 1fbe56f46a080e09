# apps/cli/main.py
"""Command-line front end.

    python -m apps.cli fit data.csv --q 1 --seed 42
    python -m apps.cli fit bundled:carbon_fibers --q scan
    python -m apps.cli describe --alpha 2 --beta 2 --delta 1.2 --grid 0:6:600
    python -m apps.cli sample --alpha 2 --beta 2 --delta 1 --n 1000 --seed 7
    python -m apps.cli gof data.csv --alpha 3.6961 --beta 2.7482 --delta 2.3073
    python -m apps.cli table

Exit codes: 0 ok, 1 fit failure, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import ValidationError

from apps.cli import report as rpt
from packages.bweibull import __version__
from packages.bweibull.datasets import bundled_manifest, load_bundled, resolve_dataset
from packages.bweibull.dist import BWeibull, ParamVector
from packages.bweibull.errors import BWeibullError, ConvergenceError, DatasetError, DomainError, FitError
from packages.bweibull.estimate import fit, select_q
from packages.bweibull.gof import both_conventions, goodness_of_fit
from packages.bweibull.models import Convention, HarmonyConfig
from packages.shared.log import configure_logging, get_logger
from packages.shared.settings import settings

log = get_logger(__name__)

EXIT_OK, EXIT_FIT, EXIT_INPUT = 0, 1, 2


# ---------- argument types ----------

def _bounds(text: str) -> List[Tuple[float, float]]:
    try:
        v = [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bounds must be six numbers: {text!r}")
    if len(v) != 6:
        raise argparse.ArgumentTypeError("bounds need a_lo,a_hi,b_lo,b_hi,d_lo,d_hi")
    pairs = [(v[0], v[1]), (v[2], v[3]), (v[4], v[5])]
    if any(not lo < hi for lo, hi in pairs) or pairs[0][0] <= 0 or pairs[1][0] <= 0:
        raise argparse.ArgumentTypeError("each low must be below its high; alpha and beta lows must be positive")
    return pairs


def _q(text: str) -> Optional[float]:
    if text == "scan":
        return None
    try:
        q = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--q takes a number or 'scan', got {text!r}")
    if not q > 0:
        raise argparse.ArgumentTypeError("q must be positive")
    return q


def _span(text: str) -> Tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected start:stop:count, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:count, got {text!r}")
    if n < 1:
        raise argparse.ArgumentTypeError("count must be >= 1")
    return a, b, n


def _conventions(name: str) -> List[Convention]:
    if name == "both":
        return [Convention.STANDARD, Convention.PUBLISHED]
    return [Convention(name)]


# ---------- output ----------

def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
        log.info("cli.written", path=out, bytes=len(text))
    else:
        sys.stdout.write(text)


def _frame_text(df: pd.DataFrame, fmt: str) -> str:
    if fmt == "csv":
        return df.to_csv(index=False, float_format="%.10g")
    return json.dumps(df.to_dict(orient="records"), indent=2) + "\n"


def _config(args: argparse.Namespace) -> HarmonyConfig:
    update = {"seed": args.seed}
    if args.bounds is not None:
        update["bounds"] = args.bounds
    if args.iterations is not None:
        update["max_iterations"] = args.iterations
    return HarmonyConfig(**update)


# ---------- commands ----------

def cmd_fit(args: argparse.Namespace) -> int:
    ds = resolve_dataset(args.data, args.input_format)
    config = _config(args)
    conventions = _conventions(args.convention)
    started = time.perf_counter()
    if args.q is None:
        sel = select_q(ds, args.q_grid, config)
        fits, selected, scan = [sel.fit], sel.q, sel.scan
    else:
        fits, selected, scan = [fit(ds, args.q, config)], None, None
    timing = time.perf_counter() - started if settings.REPORT_INCLUDE_TIMING else None

    report = rpt.build_report(
        ds, fits, seed=args.seed, conventions=conventions,
        selected_q=selected, q_scan=scan, timing_sec=timing,
    )
    if args.format == "csv":
        _emit(_frame_text(rpt.report_table(report), "csv"), args.out)
    else:
        _emit(report.model_dump_json(indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_qscan(args: argparse.Namespace) -> int:
    args.q = None
    return cmd_fit(args)


def cmd_describe(args: argparse.Namespace) -> int:
    theta = ParamVector(alpha=args.alpha, beta=args.beta, delta=args.delta)
    dist = BWeibull(theta)
    if args.grid is not None:
        a, b, n = args.grid
        if a < 0 or not b > a:
            raise DomainError("grid needs 0 <= start < stop")
        grid = np.linspace(a, b, n)
    else:
        grid = np.linspace(0.0, float(dist.quantile(0.995)), 200)
    sweep = np.linspace(*args.sweep_delta[:2], args.sweep_delta[2]) if args.sweep_delta else None

    if args.format == "csv":
        _emit(_frame_text(rpt.curve_table(theta, grid), "csv"), args.out)
        if sweep is not None:
            log.info("describe.sweep_json_only", hint="use --format json for the delta sweep")
        return EXIT_OK
    doc = rpt.describe_document(theta, grid, sweep)
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_sample(args: argparse.Namespace) -> int:
    if args.n < 1:
        raise DomainError("--n must be >= 1")
    dist = BWeibull.of(args.alpha, args.beta, args.delta)
    draws = dist.sample(args.n, args.seed)
    _emit("".join(f"{v:.17g}\n" for v in draws), args.out)
    return EXIT_OK


def cmd_gof(args: argparse.Namespace) -> int:
    ds = resolve_dataset(args.data, args.input_format)
    dist = BWeibull.of(args.alpha, args.beta, args.delta)
    results = [goodness_of_fit(ds.values, dist, c) for c in _conventions(args.convention)]
    df = pd.DataFrame([r.model_dump(mode="json") for r in results])
    _emit(_frame_text(df, args.format), args.out)
    return EXIT_OK


def cmd_table(args: argparse.Namespace) -> int:
    """Published BWeibull estimates plugged into both conventions, next to the published KS/CVM."""
    rows = []
    for name, entry in bundled_manifest().items():
        if args.dataset and name not in args.dataset:
            continue
        if entry.file is None or not (entry.confirmed or args.include_unconfirmed):
            log.info("table.skipped", dataset=name, confirmed=entry.confirmed, has_values=entry.file is not None)
            continue
        ds = load_bundled(name)
        for row in entry.table:
            if row.model != "BWeibull":
                continue
            dist = BWeibull.of(row.alpha, row.beta, row.delta)
            for g in both_conventions(ds.values, dist):
                rows.append({
                    "dataset": name,
                    "estimator": row.estimator,
                    "q": row.q,
                    "convention": g.convention.value,
                    "ks": g.ks_stat,
                    "ks_published": row.ks,
                    "ks_pvalue": g.ks_pvalue,
                    "cvm": g.cvm_stat,
                    "cvm_published": row.cvm,
                    "cvm_pvalue": g.cvm_pvalue,
                    "cvm_pvalue_published": row.cvm_pvalue,
                })
    _emit(_frame_text(pd.DataFrame(rows), args.format), args.out)
    return EXIT_OK


# ---------- parser ----------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    p.add_argument("--out", default=None, help="write to this file instead of stdout")
    p.add_argument("--format", choices=["json", "csv"], default="json")


def _add_theta(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)


def _add_data(p: argparse.ArgumentParser) -> None:
    p.add_argument("data", help="CSV / whitespace file, or bundled:<name>")
    p.add_argument("--input-format", choices=["auto", "csv", "whitespace"], default="auto")
    p.add_argument("--convention", choices=["standard", "paper", "published", "both"], default="both",
                   help="paper and published name the same convention")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bweibull", description="Bimodal Weibull distribution toolkit")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--log-level", default=None, choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    ap.add_argument("--log-json", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    for name, handler in (("fit", cmd_fit), ("qscan", cmd_qscan)):
        p = sub.add_parser(name, help="fit BWeibull by MLE / MLqE" if name == "fit" else "fit over the q grid")
        _add_data(p)
        _add_common(p)
        if name == "fit":
            p.add_argument("--q", type=_q, default=1.0, help="q value or 'scan' (1 means MLE)")
        p.add_argument("--q-grid", type=float, nargs="+", default=None)
        p.add_argument("--bounds", type=_bounds, default=None)
        p.add_argument("--iterations", type=int, default=None, help="Harmony Search iterations")
        p.set_defaults(handler=handler)

    p = sub.add_parser("describe", help="curves, moments, modality and entropies at theta")
    _add_theta(p)
    _add_common(p)
    p.add_argument("--grid", type=_span, default=None, help="start:stop:count")
    p.add_argument("--sweep-delta", type=_span, default=None, help="d0:d1:count moment sweep")
    p.set_defaults(handler=cmd_describe)

    p = sub.add_parser("sample", help="inverse-CDF draws, one per line")
    _add_theta(p)
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(handler=cmd_sample)

    p = sub.add_parser("gof", help="KS / CVM of data against BWeibull(theta)")
    _add_data(p)
    _add_theta(p)
    _add_common(p)
    p.set_defaults(handler=cmd_gof)

    p = sub.add_parser("table", help="reproduce published KS / CVM at published estimates")
    _add_common(p)
    p.add_argument("--dataset", nargs="+", default=None)
    p.add_argument("--include-unconfirmed", action="store_true")
    p.set_defaults(handler=cmd_table)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level, args.log_json or None)
    try:
        return args.handler(args)
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DomainError, ValidationError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (FitError, ConvergenceError) as exc:
        log.error("cli.fit_failed", command=args.command, error=str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FIT
    except BWeibullError as exc:
        log.error("cli.failed", command=args.command, error=type(exc).__name__, detail=str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FIT


if __name__ == "__main__":
    sys.exit(main())
