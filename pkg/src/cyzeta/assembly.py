"""Frobenius matrix assembly.

With E(phi) the logarithm-free period matrix, the inverse Frobenius matrix
is U(phi) = E(phi^p)^{-1} U_p(0) E(phi).  Its entries are rational
functions; after multiplying by D(phi^p) they become polynomials of degree
at most ceil(Cp), which is what we extract and later evaluate.

Only coefficients c_{i,n} with n <= floor(M/p) enter E(phi^p)^{-1}, so the
inverse is computed once at that tiny order (through W = E^T sigma E) and
then spread out by phi -> phi^p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .operator import CYOperator, RecurrenceTable, derive_recurrence, poly_eval_mod, poly_mul
from .padic import ScaledPadic, ord_p, padic_zeta3, reduce_fraction
from .recurrence import (RecurrenceResult, accuracy_bound, ceil_frac, run_exact_recurrence,
                         run_truncated_recurrence, target_accuracy_B)
from .series import (SeriesError, TruncSeries, mat_mul, rat_add, rat_mat_mul, rat_matrix_invert,
                     rat_mul, rat_substitute_phi_p, rat_theta, series_matrix_invert, series_mul,
                     substitute_phi_p, theta_apply)


class AssemblyError(RuntimeError):
    pass


class SingularPrimeError(AssemblyError):
    pass


def sigma(b: int) -> list[list[int]]:
    return [[(-1) ** l if k + l == b - 1 else 0 for l in range(b)] for k in range(b)]


def E_entry_terms(b: int, i: int, k: int):
    """(j, binomial, theta power) with [E]^{i,k} = sum C(k, i-j) theta^{k+j-i} f_j."""
    return [(j, comb(k, i - j), k + j - i) for j in range(max(0, i - k), i + 1)]


def build_E(f: list[TruncSeries], M: int | None = None) -> list[list[TruncSeries]]:
    b = len(f)
    p, K = f[0].p, f[0].k
    q = p**K
    if M is None:
        M = f[0].degree_bound
    E = []
    for i in range(b):
        row = []
        for k in range(b):
            out = [0] * (M + 1)
            acc = None
            for j, c, t in E_entry_terms(b, i, k):
                src = f[j].coeffs
                for n in range(M + 1):
                    x = src[n]
                    if x:
                        out[n] += c * pow(n, t) * x
                if f[j].acc is not None:
                    a = f[j].acc[: M + 1]
                    acc = a if acc is None else [min(x, y) for x, y in zip(acc, a)]
            row.append(TruncSeries(p, K, [x % q for x in out], f[0].shift, acc))
        E.append(row)
    return E


def rat_build_E(f: list[list[Fraction]]) -> list[list[list[Fraction]]]:
    b = len(f)
    M = len(f[0]) - 1
    E = []
    for i in range(b):
        row = []
        for k in range(b):
            out = [Fraction(0)] * (M + 1)
            for j, c, t in E_entry_terms(b, i, k):
                out = rat_add(out, [c * x for x in rat_theta(f[j], t)])
            row.append(out)
        E.append(row)
    return E


def _transpose(X):
    return [list(r) for r in zip(*X)]


def small_E_exact(op: CYOperator, m: int, table: RecurrenceTable | None = None):
    table = table or derive_recurrence(op)
    f = run_exact_recurrence(op, table, op.b - 1, m)
    return rat_build_E(f)


def build_W_inverse(op: CYOperator, p: int, k: int, order: int | None = None,
                    table: RecurrenceTable | None = None):
    """W^{-1} mod p^k to the given order (default ceil(C)) and its valuation.

    Also returns E mod p^k at that order, which the caller needs to form
    E^{-1} = W^{-1} E^T sigma.
    """
    if order is None:
        order = op.ceil_C
    if p <= op.ceil_C:
        raise SingularPrimeError(f"p={p} must exceed ceil(C)={op.ceil_C}")
    Er = small_E_exact(op, order, table)
    b = op.b
    try:
        E = [[TruncSeries.from_fractions(Er[i][j], p, k) for j in range(b)] for i in range(b)]
    except ArithmeticError as exc:
        raise SingularPrimeError(f"period coefficients up to degree {order} are not {p}-integral") from exc
    sig = sigma(b)
    Sig = [[TruncSeries(p, k, [sig[i][j] % p**k] + [0] * order) for j in range(b)] for i in range(b)]
    W = mat_mul(mat_mul(_transpose(E), Sig), E)
    try:
        Winv, ordv = series_matrix_invert(W)
    except SeriesError as exc:
        raise SingularPrimeError(f"W(0) is not invertible mod {p}") from exc
    return Winv, ordv, E, Sig


def E_inverse_small(op: CYOperator, p: int, k: int, order: int, table=None):
    """E(psi)^{-1} mod p^k through psi^order, via (sigma E W^{-1})^T."""
    Winv, ordv, E, Sig = build_W_inverse(op, p, k, order, table)
    X = mat_mul(mat_mul(Sig, E), Winv)
    return _transpose(X), ordv


@dataclass
class U0Matrix:
    """U_p(0) = diag(1, p, ..., p^{b-1}) (sum_r alpha_r eps^r).

    ``alpha_num[r]`` are integers with alpha_r = alpha_num[r] / p^e, known
    modulo p^(k - e).
    """

    b: int
    p: int
    k: int
    e: int
    alpha_num: list[int]

    def alpha(self, r: int) -> ScaledPadic:
        a = self.alpha_num[r]
        return ScaledPadic.from_fraction(Fraction(a, self.p**self.e), self.p, self.k - self.e)

    def min_ord_alpha(self) -> int:
        vals = [ord_p(a, self.p) for a in self.alpha_num if a % self.p**self.k]
        return min(v for v in vals if v is not None) - self.e

    def entry(self, i: int, j: int) -> ScaledPadic:
        if j > i:
            return ScaledPadic.zero(self.p)
        return self.alpha(i - j) * ScaledPadic.from_int(self.p**i, self.p, self.k + i)

    def matrix_fraction(self) -> list[list[Fraction]]:
        """Rational representative (alpha_r replaced by their representatives)."""
        pe = Fraction(self.p) ** self.e
        return [[Fraction(self.p**i * self.alpha_num[i - j]) / pe if j <= i else Fraction(0)
                 for j in range(self.b)] for i in range(self.b)]


def build_U0(b: int, p: int, k: int, K: Fraction | None, alpha3_shift: int = 0) -> U0Matrix:
    """U_p(0) with alpha_1 = alpha_2 = 0 and, for b = 4, alpha_3 = K zeta_p(3).

    ``alpha3_shift`` is added to alpha_3 (a sensitivity knob for tests).
    """
    if b not in (3, 4):
        raise ValueError("b must be 3 or 4")
    e = 0
    nums = [1] + [0] * (b - 1)
    if b == 4:
        if K is None:
            raise ValueError("K is required for b = 4")
        K = Fraction(K)
        vK = ord_p(K, p) if K else 0
        e = max(0, -vK)
        kz = k + e + 2
        z = padic_zeta3(p, kz).value
        q = p ** (k + e)
        Kunit = K * Fraction(p) ** e  # p-integral
        a3 = reduce_fraction(Kunit, p, k + e) * z % q
        a3 = (a3 + alpha3_shift * p**e) % q
        nums = [p**e] + [0, 0] + [a3]
    U0 = U0Matrix(b, p, k + e, e, nums)
    check_U0_symmetry(U0, min(k, 8))
    return U0


def check_U0_symmetry(U0: U0Matrix, k: int) -> None:
    """U0 sigma U0^T = p^{b-1} sigma modulo p^k (when U0 is p-integral)."""
    if U0.e:
        return
    b, p = U0.b, U0.p
    q = p**k
    U = [[(p**i * U0.alpha_num[i - j]) % q if j <= i else 0 for j in range(b)] for i in range(b)]
    s = sigma(b)
    lhs = [[sum(U[i][a] * s[a][c] * U[j][c] for a in range(b) for c in range(b)) % q
            for j in range(b)] for i in range(b)]
    rhs = [[p ** (b - 1) * s[i][j] % q for j in range(b)] for i in range(b)]
    if lhs != rhs:
        raise AssemblyError("U_p(0) violates the symmetry constraint")


@dataclass
class UNumerator:
    p: int
    B: int
    A: int
    M: int
    degree_cap: int
    numerator: list[list[list[int]]]
    denominator: tuple[int, ...]
    trunc_deg: int
    nadd: int
    nadd_ok: bool
    accuracy: int
    ord_W_inv: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def b(self) -> int:
        return len(self.numerator)

    @property
    def warn(self) -> bool:
        return (not self.nadd_ok) or self.trunc_deg > self.degree_cap

    def entry(self, i: int, j: int) -> list[int]:
        return self.numerator[i][j]


def degree_cap(op: CYOperator, p: int) -> int:
    return ceil_frac(op.trunc_const_C * p)


def _finish(op, p, B, A, M, nadd, cap, num, D, acc, ordv, extra) -> UNumerator:
    trunc = -1
    for row in num:
        for poly in row:
            for n in range(len(poly) - 1, trunc, -1):
                if poly[n]:
                    trunc = n
                    break
    tail_ok = all(poly[n] == 0 for row in num for poly in row for n in range(cap + 1, M + 1))
    return UNumerator(p, B, A, M, cap, num, D, max(trunc, 0), nadd, tail_ok, acc, ordv, extra)


def assemble_U_numerator(op: CYOperator, p: int, B: int | None = None, A: int | None = None,
                         nadd: int = 0, *, table: RecurrenceTable | None = None,
                         recurrence: RecurrenceResult | None = None, alpha3_shift: int = 0,
                         denominator: tuple[int, ...] | None = None) -> UNumerator:
    """Numerator D(phi^p) U(phi) mod p^B from the truncated recurrence."""
    b = op.b
    if p < 5 or p <= op.ceil_C:
        raise SingularPrimeError(f"p={p} is excluded (need p >= 5 and p > ceil(C))")
    table = table or derive_recurrence(op)
    B = target_accuracy_B(b, p) if B is None else B
    cap = degree_cap(op, p)
    M = cap + nadd
    if A is None:
        A = accuracy_bound(b, op.trunc_const_C, B)
    if recurrence is None:
        recurrence = run_truncated_recurrence(op, table, p, A, M)
    S = recurrence.shift
    U0 = build_U0(b, p, A + S, op.rational_K, alpha3_shift)
    e = U0.e
    K = A + S + e
    q = p**K
    m2 = M // p
    f = [TruncSeries(p, K, s.coeffs, S, s.acc) for s in recurrence.series]
    E = build_E(f, M)
    # rows of U_p(0) E, stored with shift S + e
    UE = []
    for l in range(b):
        row = []
        for kcol in range(b):
            out = [0] * (M + 1)
            acc = [10**9] * (M + 1)
            for j in range(l + 1):
                a = U0.alpha_num[l - j] * p**l % q
                if a == 0:
                    continue
                src = E[j][kcol]
                for n, x in enumerate(src.coeffs):
                    if x:
                        out[n] += a * x
                if src.acc is not None:
                    va = ord_p(U0.alpha_num[l - j], p) - e + l
                    acc = [min(x, y + va) for x, y in zip(acc, src.acc)]
            row.append(TruncSeries(p, K, [x % q for x in out], S + e, acc))
        UE.append(row)
    D = denominator if denominator is not None else op.denominator()
    Einv, ordv = E_inverse_small(op, p, K, m2, table)
    # G(psi) = D(psi) E(psi)^{-1}, then psi -> phi^p
    Dser = TruncSeries(p, K, [(D[n] if n < len(D) else 0) % q for n in range(m2 + 1)])
    G = [[substitute_phi_p(series_mul(Dser, Einv[i][j]), p, M) for j in range(b)] for i in range(b)]
    num = []
    acc_min = 10**9
    ord_min = min(v for row in UE for s in row for v in s.valuations())
    for i in range(b):
        row = []
        for j in range(b):
            tot = [0] * (M + 1)
            for l in range(b):
                g = G[i][l].coeffs
                for m in range(0, M + 1, p):
                    x = g[m]
                    if x:
                        src = UE[l][j].coeffs
                        for n in range(M + 1 - m):
                            y = src[n]
                            if y:
                                tot[n + m] += x * y
            ser = TruncSeries(p, K, [x % q for x in tot], S + e)
            try:
                row.append(ser.reduce_values(B))
            except SeriesError as exc:
                raise AssemblyError(f"numerator entry ({i},{j}) is not p-integral at p={p}") from exc
        num.append(row)
    for row in UE:
        for s in row:
            acc_min = min(acc_min, min(s.acc))
    # G is known modulo p^K; its error times U0 E has valuation >= K + ord(U0 E)
    accuracy = int(min(acc_min, K + ord_min))
    extra = {"shift": S, "e": e, "alpha3": U0.alpha_num[-1] if b == 4 else 0}
    return _finish(op, p, B, A, M, nadd, cap, num, D, accuracy, ordv, extra)


def assemble_U_numerator_exact(op: CYOperator, p: int, B: int | None = None, nadd: int = 0, *,
                               table: RecurrenceTable | None = None,
                               periods: list[list[Fraction]] | None = None,
                               alpha3_shift: int = 0) -> UNumerator:
    """The same numerator computed with exact rational period coefficients.

    The only p-adic input is zeta_p(3), replaced by an integer representative
    of high enough precision; everything else is exact until the final
    reduction modulo p^B.
    """
    b = op.b
    table = table or derive_recurrence(op)
    B = target_accuracy_B(b, p) if B is None else B
    cap = degree_cap(op, p)
    M = cap + nadd
    if periods is None:
        periods = run_exact_recurrence(op, table, b - 1, M)
    f = [row[: M + 1] for row in periods]
    # worst valuation of the periods; alpha needs that much extra precision
    worst = min((ord_p(x, p) for row in f for x in row if x), default=0)
    kz = B + max(0, -worst) + 4
    U0 = build_U0(b, p, kz, op.rational_K, alpha3_shift)
    U0f = U0.matrix_fraction()
    E = rat_build_E(f)
    m2 = M // p
    Es = [[E[i][j][: m2 + 1] for j in range(b)] for i in range(b)]
    sig = [[[Fraction(s)] + [Fraction(0)] * m2 for s in row] for row in sigma(b)]
    W = rat_mat_mul(rat_mat_mul(_transpose(Es), sig), Es)
    Winv = rat_matrix_invert(W)
    Einv = _transpose(rat_mat_mul(rat_mat_mul(sig, Es), Winv))
    D = op.denominator()
    Dser = [Fraction(D[n]) if n < len(D) else Fraction(0) for n in range(m2 + 1)]
    G = [[rat_substitute_phi_p(rat_mul(Dser, Einv[i][j]), p, M) for j in range(b)] for i in range(b)]
    U0E = [[[sum((U0f[l][t] * E[t][j][n] for t in range(b) if U0f[l][t]), Fraction(0))
             for n in range(M + 1)] for j in range(b)] for l in range(b)]
    num = []
    for i in range(b):
        row = []
        for j in range(b):
            tot = [Fraction(0)] * (M + 1)
            for l in range(b):
                tot = rat_add(tot, rat_mul(G[i][l], U0E[l][j]))
            try:
                row.append([reduce_fraction(x, p, B) for x in tot])
            except ArithmeticError as exc:
                raise AssemblyError(f"exact numerator entry ({i},{j}) is not p-integral") from exc
        num.append(row)
    return _finish(op, p, B, 0, M, nadd, cap, num, D, 10**9, 0, {"mode": "exact"})
