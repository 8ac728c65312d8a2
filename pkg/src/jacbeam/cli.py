"""Command-line front end: ``jacbeam <subcommand> [options]``.

Exit status is 0 on success, 2 for unparsable arguments or config, 3 when
the settings fail validation (for example users inside the Fresnel bound
without ``clamp_radius``) and 4 for file-system errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import io
from .channel import FresnelViolation
from .coa import EstimatorError, estimate_p1
from .codebooks import DFT, JAC, POLAR, dft_codebook, jac_codebook, polar_codebook
from .experiments import ValidationError, coverage_heatmap, overhead_table, rate_vs_snr

EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_IO = 4


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value experiment config")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory (default: .)")

    p = argparse.ArgumentParser(prog="jacbeam", description="Near-field beam-training simulations.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("rate-vs-snr", parents=[common], help="mean achievable rate per scheme and SNR")
    sub.add_parser("coverage", parents=[common], help="noiseless coverage heatmap")
    sub.add_parser("overhead", parents=[common], help="training slots per scheme")
    est = sub.add_parser("estimate", parents=[common], help="estimate p1 from a snapshot CSV (n, re, im)")
    est.add_argument("snapshot", type=Path)
    dump = sub.add_parser("codebook-dump", parents=[common], help="write a codebook as CSV")
    dump.add_argument("--scheme", choices=(DFT, POLAR, JAC), default=DFT)
    dump.add_argument("--p1", type=float, default=0.0, help="curvature for the jac scheme (1/m)")
    return p


def _report(path: Path, what: str) -> None:
    print(f"wrote {path}: {what}")


def _dispatch(args: argparse.Namespace) -> int:
    spec = io.load_spec(args.config, seed=args.seed)
    cfg = spec.array
    print(f"seed={spec.seed}")
    out: Path = args.out

    if args.command == "estimate":
        res = estimate_p1(io.read_snapshot(args.snapshot), cfg, spec.estimator)
        root = "none" if res.kernel_root is None else io.fmt(res.kernel_root)
        lag = "none" if res.crossing_lag is None else str(res.crossing_lag)
        print(f"p1_hat={io.fmt(res.p1_hat)} crossing_lag={lag} kernel_root={root}")
        return 0

    out.mkdir(parents=True, exist_ok=True)
    if args.command == "rate-vs-snr":
        records, notes = rate_vs_snr(spec)
        path = out / "rate_vs_snr.csv"
        io.write_rates(path, records)
        io.write_meta(out / "rate_vs_snr.meta.json", spec, notes)
        for note in notes:
            print(f"note: {note}")
        _report(path, f"{len(records)} rows, schemes {','.join(spec.schemes)} x {len(spec.snr_db)} SNR points")
    elif args.command == "coverage":
        grid = coverage_heatmap(spec)
        path = out / "coverage.csv"
        io.write_heatmap(path, grid)
        io.write_meta(out / "coverage.meta.json", spec, grid.notes)
        n = cfg.n_antennas
        parts = [f"{s} min/median {np.nanmin(v):.1f}/{np.nanmedian(v):.1f} of N={n}" for s, v in grid.r_cover.items()]
        _report(path, f"{grid.x.size}x{grid.z.size} points; " + "; ".join(parts))
    elif args.command == "overhead":
        table = overhead_table(spec)
        path = out / "overhead.csv"
        io.write_overhead(path, table)
        _report(path, ", ".join(f"{s}={n}" for s, n in table))
    elif args.command == "codebook-dump":
        if args.scheme == DFT:
            book = dft_codebook(cfg)
        elif args.scheme == POLAR:
            book = polar_codebook(cfg, spec.polar_rings, spec.polar_p1_max)
        else:
            book = jac_codebook(cfg, args.p1)
        path = out / f"codebook_{args.scheme}.csv"
        io.write_codebook(path, book)
        _report(path, f"{len(book)} codewords x {book.n_antennas} antennas, overhead {book.overhead}")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except io.ConfigError as exc:
        print(f"jacbeam: config error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValidationError, FresnelViolation, EstimatorError) as exc:
        print(f"jacbeam: invalid settings: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"jacbeam: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
