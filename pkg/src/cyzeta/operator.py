"""Calabi-Yau type operators and their period recurrences.

An operator is L = sum_i S_i(phi) theta^i with theta = phi d/dphi, stored
as the integer matrix s[i][k] of coefficients of phi^k in S_i.  Grouping by
powers of phi instead gives L = sum_k phi^k Q_k(theta), which is the form
the recurrence is read off from.

Database lines look like

    name | b | N | s[0][0..N] ; ... ; s[b][0..N] | C | K | conifold | apparent | other | exponents

where polynomials are ascending comma separated integer lists, ``-``
stands for an absent entry, ``other`` is a ``;`` separated list of
polynomials and ``exponents`` gives the exponent of each locus in the
denominator D(phi) in the order apparent, conifold, other...
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from pathlib import Path

Poly = tuple[int, ...]


class OperatorError(ValueError):
    """Malformed or invalid operator data."""


# ---------------------------------------------------------------- polynomials

def poly_trim(a) -> Poly:
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return tuple(a) if a else (0,)


def poly_mul(a, b) -> Poly:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return poly_trim(out)


def poly_pow(a, e: int) -> Poly:
    out: Poly = (1,)
    for _ in range(e):
        out = poly_mul(out, a)
    return out


def poly_eval(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def poly_eval_mod(a, x: int, q: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % q
    return acc


def poly_divided_derivative(a, r: int) -> Poly:
    """a^(r)/r!, which has integer coefficients for integer a."""
    return poly_trim([comb(j, r) * a[j] for j in range(r, len(a))] or [0])


def poly_shift(a, s: int) -> Poly:
    """The polynomial n -> a(n + s)."""
    out = [0] * len(a)
    for j, c in enumerate(a):
        for t in range(j + 1):
            out[t] += c * comb(j, t) * s ** (j - t)
    return poly_trim(out)


def poly_is_zero(a) -> bool:
    return all(c == 0 for c in a)


# ------------------------------------------------------------------- operator

@dataclass(frozen=True)
class CYOperator:
    name: str
    order_b: int
    degree_N: int
    coeffs: tuple[Poly, ...]
    trunc_const_C: Fraction
    rational_K: Fraction | None
    conifold_locus: Poly = (1,)
    apparent_sing_locus: Poly = (1,)
    other_sing_loci: tuple[Poly, ...] = ()
    denom_exponents: tuple[int, ...] | None = None
    phi_rescaling: int = 1

    def __post_init__(self):
        check_operator(self)

    @property
    def b(self) -> int:
        return self.order_b

    @property
    def N(self) -> int:
        return self.degree_N

    def S(self, i: int) -> Poly:
        return self.coeffs[i]

    def Q(self, k: int) -> Poly:
        """Q_k(theta) as ascending coefficients in theta."""
        return poly_trim([self.coeffs[i][k] for i in range(self.order_b + 1)])

    @property
    def exponents(self) -> tuple[int, ...]:
        if self.denom_exponents is not None:
            return self.denom_exponents
        return (0, 0) + (0,) * len(self.other_sing_loci)

    def denominator(self) -> Poly:
        """D(phi) = apparent^e0 * conifold^e1 * prod other_j^e_j."""
        loci = [self.apparent_sing_locus, self.conifold_locus, *self.other_sing_loci]
        D: Poly = (1,)
        for f, e in zip(loci, self.exponents):
            D = poly_mul(D, poly_pow(f, e))
        return D

    @property
    def ceil_C(self) -> int:
        C = self.trunc_const_C
        return -((-C.numerator) // C.denominator)


def check_operator(op: CYOperator) -> None:
    b, N = op.order_b, op.degree_N
    if b not in (3, 4):
        raise OperatorError(f"order b={b} not supported (3 or 4)")
    if len(op.coeffs) != b + 1:
        raise OperatorError(f"expected {b + 1} coefficient polynomials, got {len(op.coeffs)}")
    for i, S in enumerate(op.coeffs):
        if len(S) != N + 1:
            raise OperatorError(f"S_{i} has {len(S)} coefficients, expected N+1={N + 1}")
    for i in range(b):
        if op.coeffs[i][0] != 0:
            raise OperatorError(f"MUM normalization violated: S_{i}(0) = {op.coeffs[i][0]} != 0")
    if op.coeffs[b][0] != 1:
        raise OperatorError(f"MUM normalization violated: S_{b}(0) = {op.coeffs[b][0]} != 1")
    if max(len(poly_trim(S)) - 1 for S in op.coeffs) != N:
        raise OperatorError("degree_N is not the maximal degree of the S_i")
    if op.trunc_const_C <= 0:
        raise OperatorError("C must be positive")
    if (op.rational_K is not None) != (b == 4):
        raise OperatorError("K must be given exactly when b = 4")
    nloci = 2 + len(op.other_sing_loci)
    if op.denom_exponents is not None and (
        len(op.denom_exponents) != nloci or any(e < 0 for e in op.denom_exponents)
    ):
        raise OperatorError(f"need {nloci} nonnegative denominator exponents")


def normalize_coeffs(coeffs: list[list[int]], b: int) -> tuple[list[list[int]], int]:
    """Scale to S_b(0) = 1 by phi -> a*phi and division by a = S_b(0).

    Returns the new coefficients and the rescaling factor a; the original
    parameter is phi_old = a * phi_new.
    """
    for i in range(b):
        if coeffs[i][0] != 0:
            raise OperatorError(f"MUM normalization violated: S_{i}(0) = {coeffs[i][0]} != 0")
    a = coeffs[b][0]
    if a == 0:
        raise OperatorError(f"MUM normalization violated: S_{b}(0) = 0")
    if a == 1:
        return coeffs, 1
    out = []
    for row in coeffs:
        new = []
        for k, c in enumerate(row):
            num = c * a**k
            if num % a:
                raise OperatorError("rescaling does not give integral coefficients")
            new.append(num // a)
        out.append(new)
    return out, a


# ------------------------------------------------------------------ database

def _parse_poly(text: str, where: str) -> Poly:
    text = text.strip()
    if text in ("", "-"):
        return (1,)
    try:
        return poly_trim(int(x) for x in text.split(","))
    except ValueError as exc:
        raise OperatorError(f"{where}: bad integer list {text!r}") from exc


def _parse_rational(text: str, where: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise OperatorError(f"{where}: bad rational {text!r}") from exc


def parse_operator(text: str, lineno: int = 1) -> CYOperator:
    fields = [f.strip() for f in text.strip().split("|")]
    if len(fields) != 10:
        raise OperatorError(f"line {lineno}: expected 10 '|' separated fields, got {len(fields)}")
    name = fields[0]
    try:
        b = int(fields[1])
        N = int(fields[2])
    except ValueError as exc:
        raise OperatorError(f"line {lineno}, field 2/3: order and degree must be integers") from exc
    rows = []
    for j, part in enumerate(fields[3].split(";")):
        try:
            rows.append([int(x) for x in part.split(",")])
        except ValueError as exc:
            raise OperatorError(f"line {lineno}, field 4, row {j}: bad integer list") from exc
    if len(rows) != b + 1 or any(len(r) != N + 1 for r in rows):
        raise OperatorError(f"line {lineno}, field 4: need {b + 1} rows of {N + 1} integers")
    rows, scale = normalize_coeffs(rows, b)
    C = _parse_rational(fields[4], f"line {lineno}, field 5")
    K = None if fields[5] == "-" else _parse_rational(fields[5], f"line {lineno}, field 6")
    conifold = _parse_poly(fields[6], f"line {lineno}, field 7")
    apparent = _parse_poly(fields[7], f"line {lineno}, field 8")
    others = tuple(
        _parse_poly(t, f"line {lineno}, field 9") for t in fields[8].split(";") if t.strip() not in ("", "-")
    )
    if fields[9] in ("", "-"):
        exps = None
    else:
        try:
            exps = tuple(int(x) for x in fields[9].split(","))
        except ValueError as exc:
            raise OperatorError(f"line {lineno}, field 10: bad exponent list") from exc
    return CYOperator(
        name=name,
        order_b=b,
        degree_N=N,
        coeffs=tuple(tuple(r) for r in rows),
        trunc_const_C=C,
        rational_K=K,
        conifold_locus=conifold,
        apparent_sing_locus=apparent,
        other_sing_loci=others,
        denom_exponents=exps,
        phi_rescaling=scale,
    )


def _fmt_poly(a: Poly) -> str:
    return ",".join(str(c) for c in a)


def serialize_operator(op: CYOperator) -> str:
    if op.phi_rescaling != 1:
        raise OperatorError("serialize the normalized operator only")
    rows = " ; ".join(_fmt_poly(S) for S in op.coeffs)
    K = "-" if op.rational_K is None else str(op.rational_K)
    others = " ; ".join(_fmt_poly(f) for f in op.other_sing_loci) or "-"
    exps = "-" if op.denom_exponents is None else ",".join(map(str, op.denom_exponents))
    apparent = "-" if op.apparent_sing_locus == (1,) else _fmt_poly(op.apparent_sing_locus)
    return " | ".join([
        op.name, str(op.order_b), str(op.degree_N), rows, str(op.trunc_const_C), K,
        _fmt_poly(op.conifold_locus), apparent, others, exps,
    ])


def load_database(path: str | Path | None = None) -> dict[str, CYOperator]:
    if path is None:
        path = Path(__file__).parent / "data" / "operators.txt"
    ops = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        op = parse_operator(line, lineno)
        ops[op.name] = op
    return ops


def get_operator(name: str, path: str | Path | None = None) -> CYOperator:
    db = load_database(path)
    if name not in db:
        raise OperatorError(f"unknown operator {name!r}; known: {', '.join(sorted(db))}")
    return db[name]


# ---------------------------------------------------------------- recurrence

@dataclass(frozen=True)
class RecurrenceTable:
    """Integer polynomials of the coupled recurrence

        n^b c_{i,n} = sum_{r=1}^{i} G[r](n) c_{i-r,n}
                      + sum_{k=1}^{N} sum_{r=0}^{i} R[r][k](n) c_{i-r,n-k}.

    ``shifted_polys[r][k-1]`` is R[r][k]; ``same_n_couplings[r-1]`` is G[r].
    """

    b: int
    N: int
    shifted_polys: tuple[tuple[Poly, ...], ...]
    same_n_couplings: tuple[Poly, ...]

    def R(self, r: int, k: int) -> Poly:
        return self.shifted_polys[r][k - 1]

    def G(self, r: int) -> Poly:
        return self.same_n_couplings[r - 1]


def derive_recurrence(op: CYOperator) -> RecurrenceTable:
    """Read the recurrence off L(phi^{n+eps}) order by order in eps.

    L phi^{m+eps} = sum_k Q_k(m + eps) phi^{m+k+eps}, and Q_k(n - k + eps)
    expands as sum_r Q_k^{(r)}(n-k)/r! eps^r.
    """
    b, N = op.order_b, op.degree_N
    R = []
    for r in range(b):
        row = []
        for k in range(1, N + 1):
            d = poly_divided_derivative(op.Q(k), r)
            row.append(poly_trim([-c for c in poly_shift(d, -k)]))
        R.append(tuple(row))
    G = []
    for r in range(1, b):
        d = poly_divided_derivative(op.Q(0), r)
        G.append(poly_trim([-c for c in d]))
    return RecurrenceTable(b, N, tuple(R), tuple(G))


# ----------------------------------------------------------------- validation

@dataclass
class ValidationReport:
    operator: str
    checks: dict[str, bool] = field(default_factory=dict)
    details: dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def lines(self) -> list[str]:
        out = []
        for name, passed in self.checks.items():
            line = f"{name}: {'pass' if passed else 'FAIL'}"
            if name in self.details:
                line += f" ({self.details[name]})"
            out.append(line)
        return out


def validate_operator(op: CYOperator, n_integrality_N: int = 1, check_depth: int = 20) -> ValidationReport:
    if check_depth < 1:
        raise ValueError("check_depth must be >= 1")
    rep = ValidationReport(op.name)
    try:
        check_operator(op)
        rep.checks["mum"] = True
    except OperatorError as exc:
        rep.checks["mum"] = False
        rep.details["mum"] = str(exc)
        return rep
    from .recurrence import run_exact_recurrence

    table = derive_recurrence(op)
    c = run_exact_recurrence(op, table, 0, check_depth)[0]
    bad = [m for m in range(check_depth + 1) if (n_integrality_N**m * c[m]).denominator != 1]
    rep.checks["integrality"] = not bad
    if bad:
        rep.details["integrality"] = f"N^m c_0m not integral for m in {bad[:5]}"
    res = self_duality_defect(op, check_depth)
    rep.checks["self_duality"] = res is None
    if res is not None:
        rep.details["self_duality"] = res
    return rep


def _ls_mul(a, b, L):
    out = [Fraction(0)] * L
    for i, x in enumerate(a[:L]):
        if x:
            for j in range(min(len(b), L - i)):
                out[i + j] += x * b[j]
    return out


def _ls_inv(a, L):
    out = [Fraction(0)] * L
    out[0] = 1 / a[0]
    for n in range(1, L):
        out[n] = -sum(a[j] * out[n - j] for j in range(1, min(n, len(a) - 1) + 1)) / a[0]
    return out


def self_duality_defect(op: CYOperator, depth: int) -> str | None:
    """Check L alpha = alpha L* through `depth` orders in phi.

    L is made monic in d/dphi: L = d^b + sum_i A_i d^i, where A_i has a pole
    of order b - i at phi = 0.  Write every coefficient as phi^{-b} times a
    power series and alpha = phi^{-(b-1)} beta with beta' = -(2/b) a beta,
    where a = A_{b-1} - C(b,2)/phi is holomorphic.  Returns None if the two
    operators agree, otherwise a description of the first mismatch.
    """
    b = op.order_b
    L = depth + b + 2
    # theta^i = sum_j S2(i, j) phi^j d^j with Stirling numbers of the second kind
    S2 = [[0] * (b + 1) for _ in range(b + 1)]
    S2[0][0] = 1
    for i in range(1, b + 1):
        for j in range(1, i + 1):
            S2[i][j] = j * S2[i - 1][j] + S2[i - 1][j - 1]
    Sb_inv = _ls_inv([Fraction(x) for x in op.coeffs[b]], L)
    # A_i = phi^{i-b} * h_i(phi), h_i a power series
    h = []
    for i in range(b + 1):
        num = [Fraction(0)] * L
        for ip in range(i, b + 1):
            for k, c in enumerate(op.coeffs[ip]):
                if k < L:
                    num[k] += S2[ip][i] * c
        h.append(_ls_mul(num, Sb_inv, L))
    # A_{b-1} = h_{b-1}/phi and h_{b-1}(0) = C(b,2); a = (h_{b-1} - C(b,2))/phi
    a = [h[b - 1][n + 1] for n in range(L - 1)] + [Fraction(0)]
    if h[b - 1][0] != comb(b, 2):
        return "unexpected leading term of A_{b-1}"
    # beta' = -(2/b) a beta, beta(0) = 1
    beta = [Fraction(0)] * L
    beta[0] = Fraction(1)
    for n in range(L - 1):
        s = sum(a[j] * beta[n - j] for j in range(n + 1))
        beta[n + 1] = -Fraction(2, b) * s / (n + 1)
    # Laurent series are (offset, coefficient list); value = phi^offset * sum
    def lmul(x, y):
        return (x[0] + y[0], _ls_mul(x[1], y[1], L))

    def ldiff(x, times=1):
        off, cs = x
        for _ in range(times):
            cs = [(off + n) * cs[n] for n in range(len(cs))]
            off -= 1
        return (off, cs)

    def ladd(acc, x, sign=1):
        off, cs = x
        for n, c in enumerate(cs):
            if c:
                acc[off + n] = acc.get(off + n, Fraction(0)) + sign * c
    alpha = (-(b - 1), beta)
    A = [(i - b, h[i]) for i in range(b + 1)]
    # L o alpha = sum_i A_i sum_t C(i,t) alpha^{(t)} d^{i-t}
    lhs = [dict() for _ in range(b + 1)]
    for i in range(b + 1):
        for t in range(i + 1):
            ladd(lhs[i - t], lmul(A[i], ldiff(alpha, t)), comb(i, t))
    # alpha o L* with L* = sum_i (-1)^{b+i} d^i o A_i = sum_i (-1)^{b+i} sum_t C(i,t) A_i^{(t)} d^{i-t}
    rhs = [dict() for _ in range(b + 1)]
    for i in range(b + 1):
        for t in range(i + 1):
            ladd(rhs[i - t], lmul(alpha, ldiff(A[i], t)), (-1) ** (b + i) * comb(i, t))
    for j in range(b + 1):
        keys = set(lhs[j]) | set(rhs[j])
        if not keys:
            continue
        lo = 1 - 2 * b
        for e in range(lo, lo + depth + 1):
            d = lhs[j].get(e, 0) - rhs[j].get(e, 0)
            if d != 0:
                return f"coefficient of phi^{e} d^{j} differs by {d}"
    return None
