"""Truncated power series over Z_p known modulo a power of p.

A ``TruncSeries`` stores integers X_n in [0, p^k) together with a common
shift s, standing for the p-adic numbers X_n / p^s.  The stored integers
are exact representatives, so the value of coefficient n is known modulo
p^(k - s).  An optional ledger ``acc`` records, per coefficient, how well
the stored value approximates the exact one it is meant to represent
(this is the accuracy of the truncated recurrence, not the storage size).

Exact-rational twins of the operations act on plain lists of Fractions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .padic import ScaledPadic, ResidueModPk, reduce_fraction, _ord_int

try:  # GMP multiplication is much faster for the huge packed integers
    import gmpy2

    def _big(x: int):
        return gmpy2.mpz(x)
except ImportError:  # pragma: no cover
    def _big(x: int):
        return x

INF = float("inf")


class SeriesError(ValueError):
    pass


@dataclass
class TruncSeries:
    p: int
    k: int
    coeffs: list[int]
    shift: int = 0
    acc: list[int] | None = field(default=None, repr=False)

    @property
    def modulus(self) -> int:
        return self.p**self.k

    @property
    def degree_bound(self) -> int:
        return len(self.coeffs) - 1

    @property
    def precision(self) -> int:
        """Absolute precision of the stored values."""
        return self.k - self.shift

    @classmethod
    def zeros(cls, p: int, k: int, M: int, shift: int = 0) -> TruncSeries:
        return cls(p, k, [0] * (M + 1), shift)

    @classmethod
    def from_fractions(cls, xs, p: int, k: int, shift: int = 0) -> TruncSeries:
        q = p**k
        scale = Fraction(p) ** shift
        return cls(p, k, [reduce_fraction(Fraction(x) * scale, p, k) % q for x in xs], shift)

    def coefficient(self, n: int) -> ScaledPadic:
        """Coefficient n as a ScaledPadic, with the ledger accuracy if present."""
        acc = self.precision if self.acc is None else min(self.acc[n], self.precision)
        x = self.coeffs[n] % self.modulus
        if x == 0:
            return ScaledPadic.zero(self.p, acc)
        w = _ord_int(x, self.p)
        v = w - self.shift
        if v >= acc:
            return ScaledPadic.zero(self.p, acc)
        return ScaledPadic(self.p, v, ResidueModPk(self.p, acc - v, x // self.p**w), acc)

    def valuations(self) -> list[float]:
        p = self.p
        out = []
        for x in self.coeffs:
            out.append(INF if x == 0 else _ord_int(x, p) - self.shift)
        return out

    def accuracy(self) -> float:
        """Series-level accuracy: the minimum over coefficients."""
        if self.acc is None:
            return self.precision
        return min(min(self.acc), self.precision)

    def reduce_values(self, B: int) -> list[int]:
        """Values mod p^B; they must be p-integral."""
        if self.precision < B:
            raise SeriesError(f"stored precision {self.precision} below requested {B}")
        q = self.p**B
        s = self.shift
        if s <= 0:
            f = self.p ** (-s)
            return [x * f % q for x in self.coeffs]
        ps = self.p**s
        out = []
        for n, x in enumerate(self.coeffs):
            if x % ps:
                raise SeriesError(f"coefficient {n} is not p-integral")
            out.append(x // ps % q)
        return out

    def with_shift(self, s: int) -> TruncSeries:
        """Same values with a larger shift (k grows along with it)."""
        d = s - self.shift
        if d < 0:
            raise SeriesError("cannot lower the shift")
        f = self.p**d
        return TruncSeries(self.p, self.k + d, [x * f for x in self.coeffs], s, self.acc)


def _check_compatible(a: TruncSeries, b: TruncSeries):
    if a.p != b.p or a.k != b.k:
        raise SeriesError(f"modulus mismatch: {a.p}^{a.k} vs {b.p}^{b.k}")
    if len(a.coeffs) != len(b.coeffs):
        raise SeriesError("degree bound mismatch")


def _acc_or_prec(s: TruncSeries) -> list:
    return s.acc if s.acc is not None else [s.precision] * len(s.coeffs)


def series_mul(a: TruncSeries, b: TruncSeries, track: bool = True) -> TruncSeries:
    """Truncated product; shifts add, storage modulus is kept.

    The zero coefficients of the sparser factor are skipped, which makes
    products with phi -> phi^p substituted series cheap.
    """
    _check_compatible(a, b)
    q = a.modulus
    M = a.degree_bound
    nza = [i for i, x in enumerate(a.coeffs) if x]
    nzb = [j for j, x in enumerate(b.coeffs) if x]
    out = [0] * (M + 1)
    if len(nza) <= len(nzb):
        bc = b.coeffs
        for i in nza:
            x = a.coeffs[i]
            for j in range(M - i + 1):
                y = bc[j]
                if y:
                    out[i + j] += x * y
    else:
        ac = a.coeffs
        for j in nzb:
            y = b.coeffs[j]
            for i in range(M - j + 1):
                x = ac[i]
                if x:
                    out[i + j] += x * y
    res = TruncSeries(a.p, a.k, [x % q for x in out], a.shift + b.shift)
    if track and (a.acc is not None or b.acc is not None):
        res.acc = _product_ledger(a, b, res.precision)
    return res


def _product_ledger(a: TruncSeries, b: TruncSeries, cap: int) -> list[int]:
    # a b - a' b' = a (b - b') + (a - a') b'
    va, vb = a.valuations(), b.valuations()
    aa, ab = _acc_or_prec(a), _acc_or_prec(b)
    M = a.degree_bound
    out = [cap] * (M + 1)
    for i in range(M + 1):
        true_va = min(va[i], aa[i])
        for j in range(M - i + 1):
            t = min(true_va + ab[j], aa[i] + vb[j])
            if t < out[i + j]:
                out[i + j] = int(t)
    return out


def series_add(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    _check_compatible(a, b)
    s = max(a.shift, b.shift)
    fa, fb = a.p ** (s - a.shift), b.p ** (s - b.shift)
    q = a.modulus
    res = TruncSeries(a.p, a.k, [(x * fa + y * fb) % q for x, y in zip(a.coeffs, b.coeffs)], s)
    if a.acc is not None or b.acc is not None:
        res.acc = [min(x, y, res.precision) for x, y in zip(_acc_or_prec(a), _acc_or_prec(b))]
    return res


def series_scale(a: TruncSeries, c: int) -> TruncSeries:
    """Multiply by an integer (a p-adic integer given by a representative)."""
    q = a.modulus
    return TruncSeries(a.p, a.k, [x * c % q for x in a.coeffs], a.shift, a.acc)


def theta_apply(a: TruncSeries, times: int = 1) -> TruncSeries:
    if times < 0:
        raise SeriesError("theta power must be nonnegative")
    q = a.modulus
    return TruncSeries(a.p, a.k, [x * pow(n, times) % q for n, x in enumerate(a.coeffs)], a.shift, a.acc)


def substitute_phi_p(a: TruncSeries, p: int, target_bound: int, polynomial: bool = False) -> TruncSeries:
    """phi -> phi^p, truncated at target_bound.

    A truncated series must reach degree target_bound // p; pass
    ``polynomial=True`` when ``a`` is exact and the missing terms are zero.
    """
    if not polynomial and target_bound // p > a.degree_bound:
        raise SeriesError("input series too short to cover the target degree")
    out = [0] * (target_bound + 1)
    acc = None if a.acc is None else [a.precision] * (target_bound + 1)
    for n, x in enumerate(a.coeffs):
        if n * p > target_bound:
            break
        out[n * p] = x
        if acc is not None:
            acc[n * p] = a.acc[n]
    if acc is not None:
        # positions between multiples of p are exact zeros
        for m in range(target_bound + 1):
            if m % p:
                acc[m] = a.precision
    return TruncSeries(a.p, a.k, out, a.shift, acc)


def truncate(a: TruncSeries, M: int) -> TruncSeries:
    return TruncSeries(a.p, a.k, a.coeffs[: M + 1], a.shift, None if a.acc is None else a.acc[: M + 1])


# ------------------------------------------------------- matrices of series

def mat_mul(X, Y):
    n, m, r = len(X), len(Y), len(Y[0])
    out = []
    for i in range(n):
        row = []
        for j in range(r):
            s = None
            for t in range(m):
                term = series_mul(X[i][t], Y[t][j])
                s = term if s is None else series_add(s, term)
            row.append(s)
        out.append(row)
    return out


def _const_matrix_inverse(A: list[list[int]], q: int, p: int) -> list[list[int]]:
    n = len(A)
    M = [[A[i][j] % q for j in range(n)] + [int(i == j) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] % p), None)
        if piv is None:
            raise SeriesError("constant term is not invertible over Z_p")
        M[col], M[piv] = M[piv], M[col]
        inv = pow(M[col][col], -1, q)
        M[col] = [x * inv % q for x in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [(x - f * y) % q for x, y in zip(M[r], M[col])]
    return [row[n:] for row in M]


def series_matrix_invert(Mx: list[list[TruncSeries]]) -> tuple[list[list[TruncSeries]], int]:
    """Inverse of a matrix of integral series with unit constant determinant.

    Returns the inverse and the minimal valuation of its coefficients.
    """
    b = len(Mx)
    p, k = Mx[0][0].p, Mx[0][0].k
    if any(s.shift != 0 for row in Mx for s in row):
        raise SeriesError("matrix inversion expects integral (unshifted) series")
    q = p**k
    L = Mx[0][0].degree_bound + 1
    V0 = _const_matrix_inverse([[Mx[i][j].coeffs[0] for j in range(b)] for i in range(b)], q, p)
    V = [[[0] * L for _ in range(b)] for _ in range(b)]
    for i in range(b):
        for j in range(b):
            V[i][j][0] = V0[i][j]
    for n in range(1, L):
        # T = sum_{m=1}^{n} Mx_m V_{n-m};  V_n = -V0 T
        T = [[0] * b for _ in range(b)]
        for m in range(1, n + 1):
            for i in range(b):
                for t in range(b):
                    x = Mx[i][t].coeffs[m]
                    if x:
                        Vt = V[t]
                        Ti = T[i]
                        for j in range(b):
                            Ti[j] += x * Vt[j][n - m]
        for i in range(b):
            for j in range(b):
                V[i][j][n] = -sum(V0[i][t] * T[t][j] for t in range(b)) % q
    out = [[TruncSeries(p, k, V[i][j]) for j in range(b)] for i in range(b)]
    vals = [v for row in out for s in row for v in s.valuations()]
    ordv = min(vals)
    return out, (0 if ordv == INF else int(ordv))


# ------------------------------------------------------ Kronecker fast path

def _slot_bytes(n_terms: int, bound_a: int, bound_b: int) -> int:
    bits = (n_terms * bound_a * bound_b).bit_length() + 1
    return (bits + 7) // 8


def pack(xs, w: int):
    """Kronecker substitution x -> 2^(8w): nonnegative ints into one integer."""
    return _big(int.from_bytes(b"".join(int(x).to_bytes(w, "little") for x in xs), "little"))


def unpack(X, w: int, n: int) -> list[int]:
    raw = int(X).to_bytes(n * w, "little")
    return [int.from_bytes(raw[i * w:(i + 1) * w], "little") for i in range(n)]


def kronecker_mul(a: list[int], b: list[int], q: int, n_out: int | None = None) -> list[int]:
    """Product of two polynomials with coefficients in [0, q), reduced mod q."""
    if not a or not b:
        return []
    n = len(a) + len(b) - 1
    if n_out is None:
        n_out = n
    w = _slot_bytes(min(len(a), len(b)), q, q)
    X = pack(a, w) * pack(b, w)
    c = unpack(X, w, n)
    c = [x % q for x in c[:n_out]]
    return c + [0] * (n_out - len(c))


def series_mul_fast(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    _check_compatible(a, b)
    M = a.degree_bound
    q = a.modulus
    return TruncSeries(a.p, a.k, kronecker_mul(a.coeffs, b.coeffs, q, M + 1), a.shift + b.shift)


# ------------------------------------------------------------ rational twin

def rat_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    M = len(a) - 1
    out = [Fraction(0)] * (M + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(M - i + 1):
                if b[j]:
                    out[i + j] += x * b[j]
    return out


def rat_add(a, b):
    return [x + y for x, y in zip(a, b)]


def rat_theta(a, times: int = 1):
    return [x * n**times for n, x in enumerate(a)]


def rat_substitute_phi_p(a, p: int, target_bound: int):
    out = [Fraction(0)] * (target_bound + 1)
    for n, x in enumerate(a):
        if n * p > target_bound:
            break
        out[n * p] = x
    return out


def rat_mat_mul(X, Y):
    n, m, r = len(X), len(Y), len(Y[0])
    out = []
    for i in range(n):
        row = []
        for j in range(r):
            s = None
            for t in range(m):
                term = rat_mul(X[i][t], Y[t][j])
                s = term if s is None else rat_add(s, term)
            row.append(s)
        out.append(row)
    return out


def _frac_matrix_inverse(A):
    n = len(A)
    M = [list(A[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise SeriesError("singular constant term")
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [row[n:] for row in M]


def rat_matrix_invert(Mx):
    b = len(Mx)
    L = len(Mx[0][0])
    V0 = _frac_matrix_inverse([[Fraction(Mx[i][j][0]) for j in range(b)] for i in range(b)])
    V = [[[Fraction(0)] * L for _ in range(b)] for _ in range(b)]
    for i in range(b):
        for j in range(b):
            V[i][j][0] = V0[i][j]
    for n in range(1, L):
        T = [[sum((Mx[i][t][m] * V[t][j][n - m] for m in range(1, n + 1) for t in range(b)), Fraction(0))
              for j in range(b)] for i in range(b)]
        for i in range(b):
            for j in range(b):
                V[i][j][n] = -sum((V0[i][t] * T[t][j] for t in range(b)), Fraction(0))
    return V
