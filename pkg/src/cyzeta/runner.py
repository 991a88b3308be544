"""Orchestration behind the command line: compute, validate, stats, bench, export."""

from __future__ import annotations

import csv
import dataclasses
import gc
import logging
import time
import tracemalloc
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from sympy import prime, primepi

from . import analytics
from .assembly import AssemblyError
from .evaluation import GOOD, EulerFactorRecord, IntegrityError, complete_factor, functional_equation_sign
from .io import RunManifest, read_outputs, write_log, write_outputs
from .operator import CYOperator, derive_recurrence, get_operator, validate_operator
from .pipeline import MODES, LogEntry, compute_prime

log = logging.getLogger("cyzeta")


def primes_by_index(n_min: int, n_max: int) -> list[int]:
    """The n-th primes for n_min <= n <= n_max (p_1 = 2)."""
    return [int(prime(n)) for n in range(n_min, n_max + 1)]


def prime_index(p: int) -> int:
    return int(primepi(p))


def parse_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition(":")
    if not sep:
        return int(lo), int(lo)
    return int(lo), int(hi)


def parse_point(text: str) -> tuple[int, int]:
    r, sep, s = text.partition("/")
    return int(r), int(s) if sep else 1


def with_scaling(op: CYOperator, scaling: str | None) -> CYOperator:
    if scaling is None:
        return op
    return dataclasses.replace(op, trunc_const_C=Fraction(scaling))


# ------------------------------------------------------------------ compute

@dataclass
class ComputeSummary:
    output: Path
    log: Path
    primes: list[int]
    skipped: dict[int, str] = field(default_factory=dict)
    warnings: list[int] = field(default_factory=list)


def _prime_task(op: CYOperator, p: int, acc: int | None, nadd: int):
    try:
        res = compute_prime(op, p, A=acc, nadd=nadd)
    except (ValueError, AssemblyError, IntegrityError) as e:
        return p, None, None, f"{type(e).__name__}: {e}"
    return p, res.records, res.log, None


def run_compute(m: RunManifest) -> ComputeSummary:
    op = with_scaling(get_operator(m.operator, m.database), m.scaling)
    primes = primes_by_index(m.n_min, m.n_max)
    records: list[EulerFactorRecord] = []
    logs: list[LogEntry] = []
    skipped: dict[int, str] = {}
    todo = []
    for p in primes:
        if p < 5 or p <= op.ceil_C:
            skipped[p] = f"refused: need p >= 5 and p > ceil(C) = {op.ceil_C}"
        else:
            todo.append(p)
    if m.workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=m.workers) as ex:
            futs = [ex.submit(_prime_task, op, p, m.acc, m.nadd) for p in todo]
            results = [f.result() for f in futs]
    else:
        results = [_prime_task(op, p, m.acc, m.nadd) for p in todo]
    # one writer: everything is gathered, then sorted and written once
    for p, recs, entry, err in results:
        if err is not None:
            skipped[p] = err
            continue
        records.extend(recs)
        logs.append(entry)
    for p, why in sorted(skipped.items()):
        log.warning("p=%d skipped: %s", p, why)
    out = write_outputs(records, m.label, m.outdir)
    lp = write_log(logs, m.label, m.outdir, append=False)
    m.write(out.with_suffix(".json"))
    return ComputeSummary(out, lp, todo, skipped, [e.p for e in logs if e.warn])


# ----------------------------------------------------------------- validate

def run_validate(name: str, depth: int = 20, database: str | None = None, n_integrality_N: int = 1):
    op = get_operator(name, database)
    return validate_operator(op, n_integrality_N=n_integrality_N, check_depth=depth)


# -------------------------------------------------------------------- stats

def load_records(paths) -> list[EulerFactorRecord]:
    out = []
    for path in paths:
        out.extend(read_outputs(path))
    return out


def infer_order(paths, database: str | None = None) -> int | None:
    """Operator order from the manifest written next to an output file."""
    for path in paths:
        side = Path(path).with_suffix(".json")
        if side.exists():
            m = RunManifest.read(side)
            return get_operator(m.operator, m.database or database).b
    return None


@dataclass
class StatsReport:
    point: tuple[int, int]
    moments: analytics.MomentVector
    cls: analytics.DistributionClass
    threshold: float
    histogram: Path | None = None

    def lines(self) -> list[str]:
        r, s = self.point
        m = ", ".join(f"{v:.4f}" for v in self.moments.m)
        d = ", ".join(f"{k}={v:.4f}" for k, v in self.cls.distances)
        ok = "yes" if self.cls.within(self.threshold) else "no"
        out = [f"point {r}/{s}: {self.moments.count} primes",
               f"moments ({m})",
               f"squared distances {d}",
               f"nearest {self.cls.name} (within {self.threshold}: {ok})"]
        if self.histogram:
            out.append(f"histogram {self.histogram}")
        return out


def run_stats(records, r: int, s: int, prime_count: int, b: int, *, threshold: float = 2.0,
              histogram: str | Path | None = None) -> StatsReport:
    traces = analytics.gather_traces(records, r, s, prime_count)
    M = analytics.compute_moments(traces, b)
    rep = StatsReport((r, s), M, analytics.classify_distribution(M), threshold)
    if histogram is not None:
        rep.histogram, _ = analytics.write_histogram_csv(analytics.normalized(traces, b), histogram)
    return rep


# ------------------------------------------------------------------- export

EXPORT_FORMATS = ("native", "euler", "hecke", "histogram")


def record_full(rec: EulerFactorRecord, b: int) -> list[int]:
    if rec.full is not None:
        return rec.full
    a = [1, *rec.coeffs]
    sign = functional_equation_sign(a[1], a[2], b, rec.p) if b % 2 else 1
    return complete_factor(a, b, rec.p, sign)


def run_export(records, fmt: str, out: str | Path, *, b: int | None = None,
               point: tuple[int, int] | None = None, prime_count: int | None = None) -> list[Path]:
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "native":
        return [write_outputs(records, "", path=out)]
    if point is None:
        raise ValueError(f"format {fmt!r} needs a point r/s")
    r, s = point
    if b is None:
        raise ValueError(f"format {fmt!r} needs the operator order")
    recs = [dataclasses.replace(x, full=record_full(x, b)) if x.flag == GOOD and x.coeffs else x
            for x in records]
    if fmt == "euler":
        out.write_text("".join(l + "\n" for l in analytics.euler_factor_lines(recs, r, s)))
        return [out]
    if fmt == "hecke":
        if b != 4:
            raise ValueError("Hecke eigenvalues are defined for b = 4")
        by_p = analytics.index_records(recs)
        lines = ["p lambda1 lambda2"]
        for p, _ in analytics.gather_traces(by_p, r, s, prime_count or len(by_p)):
            l1, l2 = analytics.hecke_eigenvalues(by_p[p][analytics.phi_star(r, s, p)])
            lines.append(f"{p} {l1} {l2}")
        out.write_text("\n".join(lines) + "\n")
        return [out]
    if fmt == "histogram":
        traces = analytics.gather_traces(recs, r, s, prime_count or len(recs))
        return list(analytics.write_histogram_csv(analytics.normalized(traces, b), out))
    raise ValueError(f"unknown format {fmt!r}; choose from {EXPORT_FORMATS}")


# -------------------------------------------------------------------- bench

@dataclass
class BenchRow:
    mode: str
    p: int
    seconds: float
    peak_bytes: int
    error: str | None = None


@dataclass
class BenchReport:
    operator: str
    rows: list[BenchRow]
    mismatches: list[tuple[int, str]]

    def peak(self, mode: str) -> dict[int, int]:
        return {r.p: r.peak_bytes for r in self.rows if r.mode == mode and r.error is None}

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["mode", "p", "seconds", "peak_bytes", "error"])
            for r in self.rows:
                w.writerow([r.mode, r.p, f"{r.seconds:.6f}", r.peak_bytes, r.error or ""])
        return path


def _measure(fn):
    gc.collect()
    tracemalloc.start()
    t0 = time.perf_counter()
    try:
        value, err = fn(), None
    except MemoryError as e:
        value, err = None, f"MemoryError: {e}"
    dt = time.perf_counter() - t0
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    return value, dt, peak, err


def run_bench(op: CYOperator, primes, modes=MODES) -> BenchReport:
    """Peak traced allocation and wall time per (mode, prime), all points."""
    table = derive_recurrence(op)
    rows, mism = [], []
    for p in primes:
        # warm per-prime caches (zeta_p(3), Bernoulli numbers) outside the measurement
        compute_prime(op, p, mode=modes[0], table=table)
        ref = None
        for mode in modes:
            res, dt, peak, err = _measure(lambda: compute_prime(op, p, mode=mode, table=table))
            rows.append(BenchRow(mode, p, dt, peak, err))
            if res is None:
                continue
            got = [(x.phi_star, x.coeffs, x.flag) for x in res.records]
            if ref is None:
                ref = got
            elif got != ref:
                mism.append((p, mode))
    return BenchReport(op.name, rows, mism)
