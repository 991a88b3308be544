"""Per-prime Euler factor computation.

``compute_prime`` is the unit of work of the command line runner: one
prime, all points (or a chosen subset), one log entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from sympy import Poly, discriminant, factorint, symbols

from .assembly import (SingularPrimeError, UNumerator, assemble_U_numerator, assemble_U_numerator_exact,
                       degree_cap)
from .evaluation import (GOOD, EulerFactorRecord, TeichPoints, classify_point,
                         evaluate_numerators_all, evaluate_points_streaming, records_from_values,
                         teichmuller_points)
from .operator import CYOperator, RecurrenceTable, derive_recurrence
from .padic import teichmuller_lift
from .recurrence import (accuracy_bound, run_exact_recurrence, run_truncated_recurrence,
                         target_accuracy_B)
from .series import TruncSeries

MODES = ("truncated_recurrence", "truncated_rational", "exact_rational")


@dataclass
class LogEntry:
    p: int
    trunc_deg: int | None
    M: int
    warn: bool = False


@dataclass
class PrimeResult:
    p: int
    records: list[EulerFactorRecord]
    log: LogEntry
    numerator: UNumerator | None = field(default=None, repr=False)


def check_prime(op: CYOperator, p: int) -> None:
    if p < 5 or p <= op.ceil_C:
        raise ValueError(f"p={p} refused: need p >= 5 and p > ceil(C) = {op.ceil_C}")
    if p in bad_primes(op):
        raise SingularPrimeError(f"p={p} refused: singular loci degenerate mod p")


@lru_cache(maxsize=None)
def bad_primes(op: CYOperator) -> frozenset[int]:
    """Primes where the singular loci lose degree or acquire repeated roots."""
    loci = [f for f in (op.conifold_locus, op.apparent_sing_locus, *op.other_sing_loci)
            if len(f) > 1]
    if not loci:
        return frozenset()
    x = symbols("x")
    prod = Poly(1, x)
    for f in loci:
        prod *= Poly(list(reversed(f)), x)
    bad = abs(int(prod.LC())) * abs(int(discriminant(prod)))
    return frozenset(int(q) for q in factorint(bad)) if bad else frozenset()


def default_accuracy(op: CYOperator, p: int, B: int | None = None) -> int:
    B = target_accuracy_B(op.b, p) if B is None else B
    return accuracy_bound(op.b, op.trunc_const_C, B)


def _truncated_from_rational(op, table, p, A, M):
    """Exact periods reduced into the fixed-point layout of the truncated run."""
    from .recurrence import RecurrenceResult, default_shift

    S = default_shift(op.b, p, M)
    exact = run_exact_recurrence(op, table, op.b - 1, M)
    series = [TruncSeries.from_fractions(row, p, A + S, S) for row in exact]
    return RecurrenceResult(p, A, M, S, series, None)


def numerator_for_prime(op: CYOperator, p: int, *, A: int | None = None, nadd: int = 0,
                        mode: str = "truncated_recurrence", table: RecurrenceTable | None = None,
                        alpha3_shift: int = 0) -> UNumerator:
    check_prime(op, p)
    table = table or derive_recurrence(op)
    B = target_accuracy_B(op.b, p)
    if A is None:
        A = default_accuracy(op, p, B)
    if mode == "truncated_recurrence":
        return assemble_U_numerator(op, p, B, A, nadd, table=table, alpha3_shift=alpha3_shift)
    if mode == "truncated_rational":
        rec = _truncated_from_rational(op, table, p, A, degree_cap(op, p) + nadd)
        return assemble_U_numerator(op, p, B, A, nadd, table=table, recurrence=rec,
                                    alpha3_shift=alpha3_shift)
    if mode == "exact_rational":
        return assemble_U_numerator_exact(op, p, B, nadd, table=table, alpha3_shift=alpha3_shift)
    raise ValueError(f"unknown mode {mode!r}; choose from {MODES}")


def compute_prime(op: CYOperator, p: int, *, A: int | None = None, nadd: int = 0,
                  mode: str = "truncated_recurrence", points: list[int] | None = None,
                  method: str = "auto", table: RecurrenceTable | None = None,
                  check: bool = True, alpha3_shift: int = 0) -> PrimeResult:
    """Euler factors at all phi* in F_p^* (or at the residues in ``points``)."""
    num = numerator_for_prime(op, p, A=A, nadd=nadd, mode=mode, table=table,
                              alpha3_shift=alpha3_shift)
    if points is None:
        pts = teichmuller_points(p, num.B)
    else:
        q = p**num.B
        res = sorted({x % p for x in points if x % p})
        pts = TeichPoints(p, num.B, 0, res, [teichmuller_lift(x, p, num.B).value for x in res])
        method = "horner"
    mats, Dvals = evaluate_numerators_all(num, pts, method=method)
    records = records_from_values(op, num, pts, mats, Dvals, check=check)
    log = LogEntry(p, num.trunc_deg, num.M, num.warn)
    return PrimeResult(p, records, log, num)


def compute_points_streaming(op: CYOperator, p: int, points: list[int], *, A: int | None = None,
                             nadd: int = 0, table: RecurrenceTable | None = None,
                             track_degree: bool = True, check: bool = True) -> PrimeResult:
    """Single-point path for large p: no series are stored."""
    check_prime(op, p)
    B = target_accuracy_B(op.b, p)
    res = sorted({x % p for x in points if x % p})
    mats, Dvals, trunc, M = evaluate_points_streaming(op, p, res, A=A, B=B, nadd=nadd, table=table,
                                                      track_degree=track_degree)
    pts = TeichPoints(p, B, 0, res, [teichmuller_lift(x, p, B).value for x in res])

    class _Num:  # the fields records_from_values needs
        pass

    num = _Num()
    num.p, num.B, num.b, num.denominator = p, B, op.b, op.denominator()
    records = records_from_values(op, num, pts, mats, Dvals, check=check)
    cap = degree_cap(op, p)
    warn = trunc is not None and trunc > cap
    return PrimeResult(p, records, LogEntry(p, trunc, M, warn), None)


def phi_star(r: int, s: int, p: int) -> int | None:
    """r/s mod p, or None if p | s or the point reduces to 0."""
    if s % p == 0:
        return None
    x = r * pow(s, -1, p) % p
    return x or None


def good_point(op: CYOperator, x: int, p: int) -> bool:
    return classify_point(op, x, p, op.denominator()) == GOOD
