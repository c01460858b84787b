"""Command-line entry point: ``qndsim {verify,sweep,qfunc,trajectories}``.

Exit codes: 0 success, 1 invariant failure, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import parse_config
from .errors import EmitError, QNDError
from .presets import PRESETS
from .results import emit
from .runs import run_qfunc, run_sweep, run_trajectories, run_verify

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("qndsim")


def _values(text: str) -> list[float]:
    return [float(v) for v in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--config", type=Path, help="experiment config file (INI)")
    src.add_argument("--preset", choices=sorted(PRESETS), help="built-in config")
    common.add_argument("--seed", type=int, help="override run.master_seed")
    common.add_argument("--out", type=Path, help="output directory (default run.output_dir)")
    common.add_argument("--format", choices=("csv", "jsonl"), help="output format")
    common.add_argument("--N", dest="N", type=int, help="override the number of electrons")
    common.add_argument("--g", dest="g", type=float, help="override g = zeta_N - zeta_W")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="qndsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="check the exact invariants")
    sweep = sub.add_parser("sweep", parents=[common], help="error / backaction vs N or g")
    sweep.add_argument("--axis", choices=("N", "g"))
    sweep.add_argument("--values", type=_values, help="comma-separated sweep values")
    sub.add_parser("qfunc", parents=[common], help="Husimi Q grids after N electrons")
    sub.add_parser("trajectories", parents=[common], help="Monte Carlo counting records")
    return parser


def _load(args):
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise EmitError(f"cannot read config {args.config}: {exc.strerror or exc}") from exc
    else:
        text = PRESETS[args.preset or "default"]
    cfg = parse_config(text)
    cfg = cfg.with_overrides(master_seed=args.seed, N=args.N, format=args.format)
    if args.g is not None:
        cfg = cfg.with_g(args.g)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = _load(args)
        if args.command == "verify":
            bundle = run_verify(cfg)
        elif args.command == "sweep":
            bundle = run_sweep(cfg, args.axis, args.values)
        elif args.command == "qfunc":
            bundle = run_qfunc(cfg)
        else:
            bundle = run_trajectories(cfg)
        out = args.out if args.out is not None else Path(cfg.run.output_dir)
        for path in emit(bundle, out, cfg.run.format):
            log.info("wrote %s", path)
    except EmitError as exc:
        print(f"qndsim: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except QNDError as exc:
        print(f"qndsim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "verify":
        table = bundle.tables["invariants"]
        for name, res, tol, ok in zip(*table.columns.values()):
            print(f"{'PASS' if ok else 'FAIL'}  {name:34s} residual={res:.3e}  tol={tol:.0e}")
        for line in bundle.metadata["diagnostics"]:
            print(f"diagnostic: {line}")
        if not bundle.metadata["all_pass"]:
            return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
