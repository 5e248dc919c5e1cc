"""Command-line entry point: ``decpilot {sweep,bounds,rate,selftest}``."""
from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

import numpy as np

from .. import __version__, analysis
from ..errors import ConfigError, DecPilotError
from .config import load_config
from .engine import rate_sweep, run_sweep
from .results import CSV_FIELDS, emit_results, records_to_csv, records_to_jsonl, write_manifest

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3

log = logging.getLogger("decpilot")


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise DecPilotError(f"cannot write {out}: {exc}") from exc


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config, seed=args.seed)
    records = run_sweep(cfg, jobs=args.jobs)
    if args.out:
        emit_results(records, args.format, args.out)
        write_manifest(args.out, config_digest=cfg.digest(), seed=cfg.seed, version=__version__)
    else:
        sys.stdout.write(records_to_csv(records) if args.format == "csv" else records_to_jsonl(records))
    return EXIT_OK


def _cmd_rate(args) -> int:
    cfg = load_config(args.config, seed=args.seed)
    intervals = [int(v) for v in args.intervals.split(",")]
    rows = rate_sweep(cfg, intervals, ebn0_db=args.ebn0, jobs=args.jobs)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("training_interval",) + CSV_FIELDS)
    for t, r in rows:
        w.writerow([t] + [repr(v) if isinstance(v, float) else v for v in r.row().values()])
    _write(buf.getvalue(), args.out)
    if args.out:
        write_manifest(args.out, config_digest=cfg.digest(), seed=cfg.seed, version=__version__)
    return EXIT_OK


def _cmd_bounds(args) -> int:
    snr = np.arange(args.snr_min, args.snr_max + args.step / 2, args.step)
    rows = analysis.capacity_curves(
        snr, sigma_f_sq=args.sigma_f_sq, pilot_symbols=args.pilot_symbols, hx=args.hx
    )
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("snr_db", "capacity_state1", "capacity_state3"))
    for s, c1, c3 in rows:
        w.writerow((repr(s), repr(c1), repr(c3)))
    _write(buf.getvalue(), args.out)
    return EXIT_OK


def _cmd_selftest(args) -> int:
    from . import selftest

    ok = selftest.run(verbose=not args.quiet)
    return EXIT_OK if ok else EXIT_RUNTIME


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="decpilot", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def sim_flags(sp):
        sp.add_argument("--config", required=True, help="YAML experiment config")
        sp.add_argument("--seed", type=int, default=None, help="override the config seed")
        sp.add_argument("--out", default=None, help="output path (default: stdout)")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes")

    sp = sub.add_parser("sweep", help="Monte Carlo policy x Eb/N0 sweep")
    sim_flags(sp)
    sp.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    sp.set_defaults(func=_cmd_sweep)

    sp = sub.add_parser("rate", help="effective rate versus training interval")
    sim_flags(sp)
    sp.add_argument("--intervals", default="5,10,20,50,100", help="comma-separated T_I values")
    sp.add_argument("--ebn0", type=float, default=None, help="Eb/N0 in dB (default: first config point)")
    sp.set_defaults(func=_cmd_rate)

    sp = sub.add_parser("bounds", help="capacity bounds with fresh (State 1) and stale (State 3) estimates")
    sp.add_argument("--snr-min", type=float, default=0.0)
    sp.add_argument("--snr-max", type=float, default=20.0)
    sp.add_argument("--step", type=float, default=1.0)
    sp.add_argument("--pilot-symbols", type=int, default=512)
    sp.add_argument("--sigma-f-sq", type=float, default=1.0)
    sp.add_argument("--hx", type=float, default=1.0, help="source entropy in bits per symbol")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=_cmd_bounds)

    sp = sub.add_parser("selftest", help="run the built-in oracle checks")
    sp.add_argument("--quiet", action="store_true")
    sp.set_defaults(func=_cmd_selftest)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except (DecPilotError, ArithmeticError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
