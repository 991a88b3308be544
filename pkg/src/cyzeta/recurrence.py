"""The p-adically truncated period recurrence and its exact twin.

Coefficients are held in a fixed-point layout: the truncated value
c^{(A)}_{i,n} is stored as the integer X = c^{(A)}_{i,n} * p^S mod p^(A+S),
with one global shift S large enough to absorb every division by p that
occurs up to degree M.  Per n, the same-n couplings are eliminated first,

    d_i = n^i T_i - sum_{r=1}^{i} C(b, r) d_{i-r},   c_{i,n} = d_i / n^(b+i),

where T_i collects the contributions of earlier coefficients.  This is the
fully substituted recurrence, so each coefficient is truncated exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable

from .operator import CYOperator, RecurrenceTable, poly_eval
from .series import TruncSeries


def ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def target_accuracy_B(b: int, p: int) -> int:
    """Least B with C(b, ceil(b/2)) p^(ceil(b/2)(b-1)/2) <= p^B."""
    h = (b + 1) // 2
    lhs = comb(b, h) ** 2 * p ** (h * (b - 1))  # squared, the exponent may be half-integral
    B = 0
    while lhs > p ** (2 * B):
        B += 1
    return B


def accuracy_bound(b: int, C: Fraction, B: int, ord_W_inv: int = 0, min_ord_alpha: int = 0,
                   mode: str = "universal", p: int | None = None) -> int:
    C = Fraction(C)
    if mode == "universal":
        return B + (2 * b - 1) * ceil_frac(C) - b + 1 - ord_W_inv - min_ord_alpha
    if mode == "sharp":
        if p is None or p <= ceil_frac(C):
            raise ValueError("sharp bound needs p > ceil(C)")
        m = ceil_frac(C * p) // p
        return max(B + (2 * b - 1) * m - b + 1 - ord_W_inv - min_ord_alpha, B - ord_W_inv)
    raise ValueError(f"unknown mode {mode!r}")


def division_count(p: int, M: int) -> int:
    """sum_{m <= M} ord_p(m)."""
    total, q = 0, p
    while q <= M:
        total += M // q
        q *= p
    return total


def default_shift(b: int, p: int, M: int) -> int:
    return (2 * b - 1) * division_count(p, M)


@dataclass
class AccuracyLedger:
    """acc[i][n]: guaranteed ord_p(c_{i,n} - c^{(A)}_{i,n})."""

    A: int
    acc: list[list[int]]

    def __getitem__(self, key):
        i, n = key
        return self.acc[i][n]

    def minimum(self) -> int:
        return min(min(row) for row in self.acc)


@dataclass
class RecurrenceResult:
    p: int
    A: int
    M: int
    shift: int
    series: list[TruncSeries]
    ledger: AccuracyLedger | None

    def value(self, i: int, n: int) -> Fraction:
        """c^{(A)}_{i,n} as a rational number X / p^S."""
        return Fraction(self.series[i].coeffs[n], self.p**self.shift)


def _evaluated_table(table: RecurrenceTable):
    b, N = table.b, table.N
    R = [[table.R(r, k) for k in range(1, N + 1)] for r in range(b)]
    return R


def run_truncated_recurrence(op: CYOperator, table: RecurrenceTable, p: int, A: int, M: int,
                             *, shift: int | None = None, ledger: bool = True,
                             store: bool = True,
                             callback: Callable[[int, list[int]], None] | None = None) -> RecurrenceResult:
    """c^{(A)}_{i,n} for i < b and n <= M.

    ``callback(n, X)`` receives the stored integers of every degree as they
    are produced; with ``store=False`` only the last N degrees are kept,
    which is what the single-point streaming evaluation uses.
    """
    b, N = table.b, table.N
    if p < 5:
        raise ValueError("p >= 5 required")
    S = default_shift(b, p, M) if shift is None else shift
    P = p ** (A + S)
    binom = [[comb(b, r) for r in range(i + 1)] for i in range(b)]
    Rt = _evaluated_table(table)
    # window of the last N degrees: hist[k-1][i] = X_{i, n-k}
    first = [p**S % P] + [0] * (b - 1)
    hist = [first] + [[0] * b for _ in range(N - 1)]
    rows = [[x] for x in first] if store else None
    accs = [[A] for _ in range(b)] if ledger else None
    acc_hist = [[A] * b] + [[None] * b for _ in range(N - 1)] if ledger else None
    if callback is not None:
        callback(0, list(first))
    for n in range(1, M + 1):
        v = 0
        u = n
        while u % p == 0:
            u //= p
            v += 1
        extra = v * (2 * b - 1)
        Pn = P * p**extra if v else P
        kmax = min(N, n)
        Rn = [[poly_eval(Rt[r][k], n) for k in range(kmax)] for r in range(b)]
        d = [0] * b
        for i in range(b):
            t = 0
            for k in range(kmax):
                prev = hist[k]
                for r in range(i + 1):
                    x = prev[i - r]
                    if x:
                        t += Rn[r][k] * x
            t *= n**i
            bi = binom[i]
            for r in range(1, i + 1):
                t -= bi[r] * d[i - r]
            d[i] = t % Pn
        new = [0] * b
        if v == 0:
            inv = pow(n, -1, P)
            w = pow(inv, b, P)
            for i in range(b):
                new[i] = d[i] * w % P
                w = w * inv % P
        else:
            inv = pow(u, -1, Pn)
            w = pow(inv, b, Pn)
            for i in range(b):
                e = v * (b + i)
                y = d[i] * w % Pn
                pe = p**e
                if y % pe:
                    raise ArithmeticError(f"shift S={S} too small at n={n}, i={i}")
                new[i] = (y // pe) % P
                w = w * inv % Pn
        if ledger:
            a = []
            for i in range(b):
                m = A
                for k in range(kmax):
                    row = acc_hist[k]
                    for j in range(i + 1):
                        if row[j] is not None and row[j] < m:
                            m = row[j]
                a.append(m - (b + i) * v)
            acc_hist = [a] + acc_hist[:-1]
            for i in range(b):
                accs[i].append(a[i])
        hist = [new] + hist[:-1]
        if store:
            for i in range(b):
                rows[i].append(new[i])
        if callback is not None:
            callback(n, new)
    series = []
    if store:
        for i in range(b):
            s = TruncSeries(p, A + S, rows[i], S)
            if ledger:
                s.acc = accs[i]
            series.append(s)
    led = AccuracyLedger(A, accs) if ledger else None
    return RecurrenceResult(p, A, M, S, series, led)


def run_exact_recurrence(op: CYOperator, table: RecurrenceTable, i_max: int, M: int) -> list[list[Fraction]]:
    """Exact c_{i,n} for i <= i_max, n <= M, with c_{i,0} = delta_{i,0}."""
    b, N = table.b, table.N
    c = [[Fraction(0)] * (M + 1) for _ in range(i_max + 1)]
    c[0][0] = Fraction(1)
    for n in range(1, M + 1):
        nb = Fraction(n) ** b
        Rn = [[poly_eval(table.R(r, k), n) for k in range(1, N + 1)] for r in range(b)]
        Gn = [poly_eval(table.G(r), n) for r in range(1, b)]
        for i in range(i_max + 1):
            t = Fraction(0)
            for r in range(1, i + 1):
                t += Gn[r - 1] * c[i - r][n]
            for k in range(1, min(N, n) + 1):
                for r in range(i + 1):
                    t += Rn[r][k - 1] * c[i - r][n - k]
            c[i][n] = t / nb
    return c
