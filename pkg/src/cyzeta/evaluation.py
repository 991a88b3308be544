"""Evaluation of the numerator at Teichmüller points and Euler factors.

The Teichmüller lifts of F_p^* are exactly the powers w^0, ..., w^{p-2} of
w = Teich(g) for a primitive root g.  Evaluating a polynomial at all of
them is a length p-1 discrete Fourier transform over Z/p^B, done here by
the chirp identity nk = C(n+k,2) - C(n,2) - C(k,2), which turns it into
one convolution, itself done by Kronecker substitution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from sympy.ntheory import primitive_root

from .assembly import E_entry_terms, UNumerator, build_U0, degree_cap
from .operator import CYOperator, RecurrenceTable, derive_recurrence, poly_eval_mod
from .padic import balanced, teichmuller_lift
from .recurrence import accuracy_bound, run_truncated_recurrence, target_accuracy_B
from .series import _slot_bytes, pack, unpack

GOOD, CONIFOLD, OTHER = "good", "C", "other_singular"


class IntegrityError(RuntimeError):
    """An Euler factor violates the Weil bounds or the functional equation."""


@dataclass
class TeichPoints:
    p: int
    B: int
    generator: int
    residues: list[int]
    lifts: list[int]


def teichmuller_points(p: int, B: int) -> TeichPoints:
    """All Teich(x), x in F_p^*, as successive powers of Teich(g)."""
    g = primitive_root(p)
    q = p**B
    w = teichmuller_lift(g, p, B).value
    res, lifts = [], []
    r, t = 1, 1
    for _ in range(p - 1):
        res.append(r)
        lifts.append(t)
        r = r * g % p
        t = t * w % q
    return TeichPoints(p, B, g, res, lifts)


# --------------------------------------------------------------- evaluation

def horner_all(poly: list[int], points: list[int], q: int) -> list[int]:
    out = []
    rev = poly[::-1]
    for t in points:
        acc = 0
        for c in rev:
            acc = (acc * t + c) % q
        out.append(acc)
    return out


class ChirpDFT:
    """Values of polynomials at w^0..w^{L-1} for a fixed L-th root of unity w."""

    def __init__(self, w: int, L: int, q: int):
        self.w, self.L, self.q = w, L, q
        winv = pow(w, L - 1, q)
        # chirp[m] = w^{C(m,2)} for m < 2L - 1, ichirp[n] = w^{-C(n,2)} for n < L
        chirp = [1] * (2 * L - 1)
        x, step = 1, 1
        for m in range(1, 2 * L - 1):
            x = x * step % q  # step = w^{m-1}
            chirp[m] = x
            step = step * w % q
        ichirp = [1] * L
        x, step = 1, 1
        for n in range(1, L):
            x = x * step % q
            ichirp[n] = x
            step = step * winv % q
        self.chirp, self.ichirp = chirp, ichirp
        self.slot = _slot_bytes(L, q, q)
        self.packed_chirp = pack(chirp, self.slot)

    def __call__(self, poly: list[int]) -> list[int]:
        L, q = self.L, self.q
        folded = [0] * L
        for n, c in enumerate(poly):
            folded[n % L] += c
        u = [folded[n] % q * self.ichirp[n] % q for n in range(L)]
        conv = unpack(pack(u[::-1], self.slot) * self.packed_chirp, self.slot, 3 * L - 2)
        return [conv[L - 1 + k] % q * self.ichirp[k] % q for k in range(L)]


def evaluate_numerators_all(num: UNumerator, points: TeichPoints, method: str = "auto",
                            horner_threshold: int = 60):
    """Per-point matrices of the numerator (through degree ceil(Cp)) and D(t).

    ``points`` must be the full ordered Teichmüller set for the DFT path.
    """
    p, B = num.p, num.B
    q = p**B
    b = num.b
    cap = num.degree_cap
    if method == "auto":
        method = "horner" if p < horner_threshold else "dft"
    if method == "dft" and len(points.lifts) != p - 1:
        method = "horner"
    vals = [[None] * b for _ in range(b)]
    if method == "dft":
        dft = ChirpDFT(points.lifts[1] if p > 2 else 1, p - 1, q)
        for i in range(b):
            for j in range(b):
                vals[i][j] = dft(num.numerator[i][j][: cap + 1])
    elif method == "horner":
        for i in range(b):
            for j in range(b):
                vals[i][j] = horner_all(num.numerator[i][j][: cap + 1], points.lifts, q)
    else:
        raise ValueError(f"unknown evaluation method {method!r}")
    mats = []
    Dvals = []
    for idx, t in enumerate(points.lifts):
        mats.append([[vals[i][j][idx] for j in range(b)] for i in range(b)])
        Dvals.append(poly_eval_mod(num.denominator, t, q))
    return mats, Dvals


# ------------------------------------------------------------ Euler factors

def _mat_mul_mod(X, Y, q):
    n = len(X)
    return [[sum(X[i][t] * Y[t][j] for t in range(n)) % q for j in range(n)] for i in range(n)]


def newton_coefficients(U: list[list[int]], kmax: int, q: int, p: int) -> list[int]:
    """a_0..a_kmax of det(I - T U) modulo q from traces of powers of U."""
    b = len(U)
    traces = []
    P = U
    for i in range(1, kmax + 1):
        if i > 1:
            P = _mat_mul_mod(P, U, q)
        traces.append(sum(P[j][j] for j in range(b)) % q)
    a = [1]
    for k in range(1, kmax + 1):
        s = sum(traces[i - 1] * a[k - i] for i in range(1, k + 1))
        a.append(-s * pow(k, -1, q) % q)
    return a


def complete_factor(a: list[int], b: int, p: int, sign: int = 1) -> list[int]:
    """Fill a_j for j > ceil(b/2) from a_j = sign * a_{b-j} p^{(b-1)(2j-b)/2}."""
    h = (b + 1) // 2
    full = list(a[: h + 1]) + [0] * (b - h)
    for j in range(h + 1, b + 1):
        e = (b - 1) * (2 * j - b)
        if e % 2:
            raise ValueError("half-integral exponent")
        full[j] = sign * full[b - j] * p ** (e // 2)
    return full


def functional_equation_sign(a1: int, a2: int, b: int, p: int) -> int:
    """+1 for b = 4; for b = 3 the sign eps with a_2 = eps p a_1."""
    if b % 2 == 0:
        return 1
    if a2 == p * a1:
        return 1
    if a2 == -p * a1:
        return -1
    raise IntegrityError(f"b=3 factor violates a_2 = ±p a_1 (a1={a1}, a2={a2}, p={p})")


def weil_ok(coeffs: list[int], b: int, p: int) -> bool:
    for j, a in enumerate(coeffs):
        if j == 0:
            continue
        # |a_j| <= C(b,j) p^{j(b-1)/2}, compared after squaring
        if a * a > comb(b, j) ** 2 * p ** (j * (b - 1)):
            return False
    return True


def euler_factor_from_U(U: list[list[int]], b: int, p: int, B: int, check: bool = True):
    """Returns (a_1..a_h balanced, full list a_0..a_b)."""
    q = p**B
    h = (b + 1) // 2
    a = newton_coefficients(U, h, q, p)
    a = [1] + [balanced(x, q) for x in a[1:]]
    sign = functional_equation_sign(a[1], a[2], b, p) if (b == 3 and check) else 1
    if b == 3 and not check:
        sign = 1 if a[2] == p * a[1] else -1 if a[2] == -p * a[1] else 1
    full = complete_factor(a, b, p, sign)
    if check and not weil_ok(full, b, p):
        raise IntegrityError(f"Weil bound violated at p={p}: {a[1:]}")
    return a[1:], full


@dataclass
class EulerFactorRecord:
    p: int
    phi_star: int
    coeffs: list[int]
    flag: str = GOOD
    full: list[int] | None = field(default=None, compare=False)

    def sort_key(self):
        return (self.p, self.phi_star)


def classify_point(op: CYOperator, x: int, p: int, D: tuple[int, ...]) -> str:
    if poly_eval_mod(op.conifold_locus, x, p) == 0:
        return CONIFOLD
    if poly_eval_mod(D, x, p) == 0:
        return OTHER
    for f in [op.apparent_sing_locus, *op.other_sing_loci, op.coeffs[op.b]]:
        if poly_eval_mod(f, x, p) == 0:
            return OTHER
    return GOOD


def records_from_values(op: CYOperator, num: UNumerator, points: TeichPoints, mats, Dvals,
                        check: bool = True) -> list[EulerFactorRecord]:
    p, B, b = num.p, num.B, num.b
    q = p**B
    out = []
    for x, U, Dt in zip(points.residues, mats, Dvals):
        flag = classify_point(op, x, p, num.denominator)
        if Dt % p == 0 or flag == OTHER:
            out.append(EulerFactorRecord(p, x, [], OTHER if flag == GOOD else flag))
            continue
        dinv = pow(Dt, -1, q)
        Ut = [[v * dinv % q for v in row] for row in U]
        coeffs, full = euler_factor_from_U(Ut, b, p, B, check=check and flag == GOOD)
        out.append(EulerFactorRecord(p, x, coeffs, flag, full))
    out.sort(key=EulerFactorRecord.sort_key)
    return out


def truncated_period_mod_p(op: CYOperator, p: int, table: RecurrenceTable | None = None) -> list[int]:
    """Coefficients of f_0^{[p-1]} modulo p."""
    table = table or derive_recurrence(op)
    r = run_truncated_recurrence(op, table, p, 1, p - 1, shift=0, ledger=False)
    return [x % p for x in r.series[0].coeffs]


def hasse_witt_check(op: CYOperator, p: int, record: EulerFactorRecord,
                     f0: list[int] | None = None) -> bool | None:
    """a_1 = -f_0^{[p-1]}(phi*) mod p at ordinary points; None if not ordinary."""
    if record.flag != GOOD or not record.coeffs:
        return None
    if f0 is None:
        f0 = truncated_period_mod_p(op, p)
    v = poly_eval_mod(f0, record.phi_star, p)
    if v == 0:
        return None
    return (record.coeffs[0] + v) % p == 0


# ------------------------------------------------- streaming single points

def evaluate_points_streaming(op: CYOperator, p: int, residues: list[int], *, A: int | None = None,
                              B: int | None = None, nadd: int = 0,
                              table: RecurrenceTable | None = None, alpha3_shift: int = 0,
                              track_degree: bool = True):
    """Numerator matrices at a few points without storing any series.

    Accumulates F[j][s] = sum_n n^s c_{j,n} t^n while the recurrence runs
    and assembles E(t), then U(t), from these sums.  Requires only O(b^2)
    numbers per point.  Returns (matrices, D values, trunc_deg or None, M).
    """
    from .assembly import E_inverse_small

    b = op.b
    table = table or derive_recurrence(op)
    B = target_accuracy_B(b, p) if B is None else B
    A = accuracy_bound(b, op.trunc_const_C, B) if A is None else A
    cap = degree_cap(op, p)
    M = cap + nadd
    from .recurrence import default_shift

    S = default_shift(b, p, M)
    U0 = build_U0(b, p, A + S, op.rational_K, alpha3_shift)
    e = U0.e
    K = A + S + e
    qK = p**K
    qB = p**B
    m2 = M // p
    cutoffs = sorted({cap - m * p for m in range(m2 + 1) if cap - m * p >= 0})
    ts = [teichmuller_lift(x, p, K).value for x in residues]
    F = [[[0] * b for _ in range(b)] for _ in ts]
    snaps: list[dict] = [dict() for _ in ts]
    tn = [1] * len(ts)
    track = track_degree and m2 == 0
    state = {"trunc": -1}
    PS = p ** (S + e)
    apows = [U0.alpha_num[r] * 1 for r in range(b)]

    def on_coeff(n, X):
        for idx, t in enumerate(ts):
            Fi = F[idx]
            w = tn[idx]
            for j in range(b):
                x = X[j]
                if x:
                    y = x * w % qK
                    row = Fi[j]
                    ns = 1
                    for s in range(b):
                        row[s] += y * ns
                        ns *= n
            tn[idx] = w * t % qK
            if n in cutoffs_set:
                snaps[idx][n] = [[v % qK for v in row] for row in Fi]
        if track and n <= M:
            # coefficient n of U_p(0) E is zero mod p^B in every entry?
            nz = False
            for l in range(b):
                if nz:
                    break
                for kcol in range(b):
                    tot = 0
                    for j in range(l + 1):
                        a = apows[l - j]
                        if not a:
                            continue
                        for jj, c, s in E_entry_terms(b, j, kcol):
                            if X[jj]:
                                tot += a * c * n**s * X[jj]
                    tot = tot * p**l % qK
                    if tot % PS:
                        nz = True
                        break
                    if (tot // PS) % qB:
                        nz = True
                        break
            if nz:
                state["trunc"] = n

    cutoffs_set = set(cutoffs)
    run_truncated_recurrence(op, table, p, A, M, shift=S, ledger=False, store=False, callback=on_coeff)
    Einv, _ = E_inverse_small(op, p, K, m2, table)
    D = op.denominator()
    G = []
    for m in range(m2 + 1):
        Dm = [[0] * b for _ in range(b)]
        for i in range(b):
            for j in range(b):
                Dm[i][j] = sum((D[r] if r < len(D) else 0) * Einv[i][j].coeffs[m - r]
                               for r in range(m + 1)) % qK
        G.append(Dm)
    mats, Dvals = [], []
    for idx, (x, t) in enumerate(zip(residues, ts)):
        U = [[0] * b for _ in range(b)]
        for m in range(m2 + 1):
            c = cap - m * p
            if c < 0:
                continue
            Fs = snaps[idx][c]
            # E(t) truncated at degree c
            E = [[sum(cc * Fs[j][s] for j, cc, s in E_entry_terms(b, i, kcol)) % qK
                  for kcol in range(b)] for i in range(b)]
            UE = [[sum(U0.alpha_num[l - j] * E[j][kcol] for j in range(l + 1)) * p**l % qK
                   for kcol in range(b)] for l in range(b)]
            tm = pow(t, m * p, qK)
            for i in range(b):
                for kcol in range(b):
                    U[i][kcol] += tm * sum(G[m][i][l] * UE[l][kcol] for l in range(b))
        Ured = []
        for i in range(b):
            row = []
            for kcol in range(b):
                y = U[i][kcol] % qK
                if y % PS:
                    raise ArithmeticError("streamed numerator is not p-integral")
                row.append(y // PS % qB)
            Ured.append(row)
        mats.append(Ured)
        Dvals.append(poly_eval_mod(D, t, qB))
    trunc = max(state["trunc"], 0) if track else None
    return mats, Dvals, trunc, M
