"""Command line entry point: ``cyzeta {compute,validate,stats,bench,export}``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import runner
from .io import RunManifest
from .operator import OperatorError, get_operator
from .pipeline import MODES


def _order(args) -> int:
    if getattr(args, "operator", None):
        return get_operator(args.operator, args.database).b
    if getattr(args, "order", None):
        return args.order
    b = runner.infer_order(args.inputs, args.database)
    if b is None:
        raise ValueError("cannot infer the operator order; pass --operator or --order")
    return b


def cmd_compute(args) -> int:
    lo, hi = runner.parse_range(args.primes)
    m = RunManifest(label=args.label, operator=args.operator, n_min=lo, n_max=hi,
                    scaling=args.scaling, acc=args.acc, nadd=args.nadd, outdir=args.outdir,
                    database=args.database, workers=args.workers)
    s = runner.run_compute(m)
    done = [p for p in s.primes if p not in s.skipped]
    print(f"wrote {s.output} and {s.log} ({len(done)} primes)")
    for p, why in sorted(s.skipped.items()):
        print(f"skipped p={p}: {why}", file=sys.stderr)
    if s.warnings:
        print(f"WARN: termination check failed at p in {s.warnings}", file=sys.stderr)
    return 0


def cmd_validate(args) -> int:
    rep = runner.run_validate(args.operator, args.depth, args.database, args.integrality_N)
    for line in rep.lines():
        print(line)
    return 0 if rep.ok else 1


def cmd_stats(args) -> int:
    r, s = runner.parse_point(args.point)
    recs = runner.load_records(args.inputs)
    rep = runner.run_stats(recs, r, s, args.primes, _order(args), threshold=args.threshold,
                           histogram=args.histogram)
    for line in rep.lines():
        print(line)
    return 0


def cmd_bench(args) -> int:
    lo, hi = runner.parse_range(args.primes)
    op = get_operator(args.operator, args.database)
    primes = [p for p in runner.primes_by_index(lo, hi) if p >= 5 and p > op.ceil_C]
    rep = runner.run_bench(op, primes, args.modes)
    path = rep.write_csv(args.csv)
    for row in rep.rows:
        extra = f" {row.error}" if row.error else ""
        print(f"{row.mode:22s} p={row.p:<6d} {row.seconds:9.3f}s {row.peak_bytes / 2**20:10.3f} MiB{extra}")
    print(f"wrote {path}")
    if rep.mismatches:
        print(f"modes disagree at {rep.mismatches}", file=sys.stderr)
        return 1
    return 0


def cmd_export(args) -> int:
    recs = runner.load_records(args.inputs)
    point = runner.parse_point(args.point) if args.point else None
    b = None if args.format == "native" else _order(args)
    for path in runner.run_export(recs, args.format, args.out, b=b, point=point, prime_count=args.primes):
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cyzeta", description=__doc__)
    ap.add_argument("--database", help="operator database file (default: bundled)")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("compute", help="Euler factors over a range of prime indices")
    c.add_argument("--operator", required=True)
    c.add_argument("--primes", required=True, help="n_min:n_max, indices into 2, 3, 5, ...")
    c.add_argument("--label", required=True)
    c.add_argument("--scaling", help="override the series-order constant C (r/s)")
    c.add_argument("--acc", type=int, help="override the recurrence accuracy A")
    c.add_argument("--nadd", type=int, default=0)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--outdir", default=".")
    c.set_defaults(fn=cmd_compute)

    v = sub.add_parser("validate", help="check the Calabi-Yau conditions of an operator")
    v.add_argument("--operator", required=True)
    v.add_argument("--depth", type=int, default=20)
    v.add_argument("--integrality-N", dest="integrality_N", type=int, default=1)
    v.set_defaults(fn=cmd_validate)

    s = sub.add_parser("stats", help="trace moments and distribution class at a point")
    s.add_argument("--inputs", nargs="+", required=True)
    s.add_argument("--point", required=True, help="r/s")
    s.add_argument("--primes", type=int, required=True)
    s.add_argument("--operator")
    s.add_argument("--order", type=int)
    s.add_argument("--threshold", type=float, default=2.0)
    s.add_argument("--histogram", help="also write a histogram CSV here")
    s.set_defaults(fn=cmd_stats)

    b = sub.add_parser("bench", help="time and peak memory of the three period modes")
    b.add_argument("--operator", required=True)
    b.add_argument("--primes", required=True)
    b.add_argument("--modes", nargs="+", default=list(MODES), choices=MODES)
    b.add_argument("--csv", default="bench.csv")
    b.set_defaults(fn=cmd_bench)

    e = sub.add_parser("export", help="re-emit records as native, euler, hecke or histogram files")
    e.add_argument("--inputs", nargs="+", required=True)
    e.add_argument("--format", required=True, choices=runner.EXPORT_FORMATS)
    e.add_argument("--out", required=True)
    e.add_argument("--point", help="r/s (all formats except native)")
    e.add_argument("--primes", type=int, help="limit to the first N usable primes")
    e.add_argument("--operator")
    e.add_argument("--order", type=int)
    e.set_defaults(fn=cmd_export)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.fn(args)
    except (ValueError, OperatorError, OSError, ArithmeticError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
