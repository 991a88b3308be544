"""p-adic numbers known modulo a power of p.

Two representations live here.  ``ResidueModPk`` is a plain residue
class of Z/p^k.  ``ScaledPadic`` carries an explicit valuation, a unit
part and an absolute accuracy, so that numbers with negative valuation
(such as the period coefficients c_{i,n} with p | n) can be handled
with their precision loss made explicit.

The hot loops of the recurrence do not use these classes; they work on
bare integers in a fixed-point layout (see ``recurrence``).  These
classes are the reference semantics and are used by the tests and the
slow paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache


def ord_p(x: int | Fraction, p: int) -> int | None:
    """Valuation of a nonzero rational; ``None`` for zero."""
    if isinstance(x, Fraction):
        if x == 0:
            return None
        return _ord_int(x.numerator, p) - _ord_int(x.denominator, p)
    if x == 0:
        return None
    return _ord_int(x, p)


def _ord_int(x: int, p: int) -> int:
    x = abs(x)
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def reduce_fraction(x: Fraction | int, p: int, k: int) -> int:
    """Image of a p-integral rational in Z/p^k."""
    x = Fraction(x)
    if x.denominator % p == 0:
        raise ArithmeticError(f"{x} is not {p}-integral")
    q = p**k
    return x.numerator * pow(x.denominator, -1, q) % q


@dataclass(frozen=True)
class ResidueModPk:
    p: int
    k: int
    value: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("accuracy exponent must be nonnegative")
        q = self.p**self.k
        if not 0 <= self.value < q:
            object.__setattr__(self, "value", self.value % q)

    @property
    def modulus(self) -> int:
        return self.p**self.k

    def _check(self, other: ResidueModPk):
        if self.p != other.p or self.k != other.k:
            raise ValueError("residues live in different rings")

    def __add__(self, other: ResidueModPk) -> ResidueModPk:
        self._check(other)
        return ResidueModPk(self.p, self.k, (self.value + other.value) % self.modulus)

    def __sub__(self, other: ResidueModPk) -> ResidueModPk:
        self._check(other)
        return ResidueModPk(self.p, self.k, (self.value - other.value) % self.modulus)

    def __neg__(self) -> ResidueModPk:
        return ResidueModPk(self.p, self.k, -self.value % self.modulus)

    def __mul__(self, other: ResidueModPk) -> ResidueModPk:
        self._check(other)
        return ResidueModPk(self.p, self.k, self.value * other.value % self.modulus)

    def __pow__(self, e: int) -> ResidueModPk:
        return ResidueModPk(self.p, self.k, pow(self.value, e, self.modulus))

    def inverse(self) -> ResidueModPk:
        if self.value % self.p == 0:
            raise ZeroDivisionError("not a unit")
        return ResidueModPk(self.p, self.k, pow(self.value, -1, self.modulus))

    def reduce(self, k: int) -> ResidueModPk:
        if k > self.k:
            raise ValueError("cannot gain accuracy by reduction")
        return ResidueModPk(self.p, k, self.value)


def balanced_lift(x: ResidueModPk) -> int:
    """The representative of x in (-p^k/2, p^k/2]."""
    q = x.modulus
    v = x.value % q
    return v - q if 2 * v > q else v


def balanced(v: int, q: int) -> int:
    v %= q
    return v - q if 2 * v > q else v


@dataclass(frozen=True)
class ScaledPadic:
    """p^valuation * unit, known modulo p^known_accuracy.

    The exact zero has ``valuation is None`` and ``known_accuracy is None``.
    A zero known only to some accuracy a has ``valuation is None`` and
    ``known_accuracy == a``.
    """

    p: int
    valuation: int | None
    unit: ResidueModPk | None
    known_accuracy: int | None

    @classmethod
    def zero(cls, p: int, accuracy: int | None = None) -> ScaledPadic:
        return cls(p, None, None, accuracy)

    @classmethod
    def from_fraction(cls, x: Fraction | int, p: int, accuracy: int) -> ScaledPadic:
        x = Fraction(x)
        if x == 0:
            return cls.zero(p, accuracy)
        v = ord_p(x, p)
        if v >= accuracy:
            return cls.zero(p, accuracy)
        u = x / Fraction(p) ** v
        k = accuracy - v
        return cls(p, v, ResidueModPk(p, k, reduce_fraction(u, p, k)), accuracy)

    @classmethod
    def from_int(cls, x: int, p: int, accuracy: int) -> ScaledPadic:
        return cls.from_fraction(Fraction(x), p, accuracy)

    @property
    def is_zero(self) -> bool:
        return self.valuation is None

    @property
    def is_exact_zero(self) -> bool:
        return self.valuation is None and self.known_accuracy is None

    def to_fraction(self) -> Fraction:
        """A rational representative (exact for exact elements)."""
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.unit.value) * Fraction(self.p) ** self.valuation

    def residue(self, k: int) -> int:
        """Image in Z/p^k; needs valuation >= 0 and enough accuracy."""
        if self.known_accuracy is not None and self.known_accuracy < k:
            raise ArithmeticError("insufficient accuracy")
        if self.is_zero:
            return 0
        if self.valuation < 0:
            raise ArithmeticError("negative valuation")
        return self.unit.value * self.p**self.valuation % self.p**k

    def _acc(self) -> float:
        return float("inf") if self.known_accuracy is None else self.known_accuracy

    def __mul__(self, other: ScaledPadic) -> ScaledPadic:
        p = self.p
        if self.is_zero or other.is_zero:
            if self.is_exact_zero or other.is_exact_zero:
                return ScaledPadic.zero(p)
            # zero known to accuracy a times y has accuracy a + ord(y)
            if self.is_zero and other.is_zero:
                return ScaledPadic.zero(p, self.known_accuracy + other.known_accuracy)
            z, y = (self, other) if self.is_zero else (other, self)
            return ScaledPadic.zero(p, z.known_accuracy + y.valuation)
        v = self.valuation + other.valuation
        k = min(self.unit.k, other.unit.k)
        u = ResidueModPk(p, k, self.unit.value * other.unit.value)
        return ScaledPadic(p, v, u, v + k)

    def inverse(self) -> ScaledPadic:
        if self.is_zero:
            raise ZeroDivisionError("division by zero p-adic")
        v = -self.valuation
        return ScaledPadic(self.p, v, self.unit.inverse(), v + self.unit.k)

    def __truediv__(self, other: ScaledPadic) -> ScaledPadic:
        return self * other.inverse()

    def __neg__(self) -> ScaledPadic:
        if self.is_zero:
            return self
        return ScaledPadic(self.p, self.valuation, -self.unit, self.known_accuracy)

    def __add__(self, other: ScaledPadic) -> ScaledPadic:
        p = self.p
        acc = min(self._acc(), other._acc())
        if self.is_zero and other.is_zero:
            return ScaledPadic.zero(p, None if acc == float("inf") else int(acc))
        if self.is_zero:
            return _truncate(other, acc)
        if other.is_zero:
            return _truncate(self, acc)
        acc = int(acc)
        v0 = min(self.valuation, other.valuation)
        q = p ** (acc - v0)
        s = (self.unit.value * p ** (self.valuation - v0)
             + other.unit.value * p ** (other.valuation - v0)) % q
        if s == 0:
            return ScaledPadic.zero(p, acc)
        w = _ord_int(s, p)
        v = v0 + w
        k = acc - v
        return ScaledPadic(p, v, ResidueModPk(p, k, s // p**w), acc)

    def __sub__(self, other: ScaledPadic) -> ScaledPadic:
        return self + (-other)


def _truncate(x: ScaledPadic, acc: float) -> ScaledPadic:
    if acc == float("inf") or x.is_zero:
        return x
    acc = int(acc)
    if x.valuation >= acc:
        return ScaledPadic.zero(x.p, acc)
    return ScaledPadic(x.p, x.valuation, x.unit.reduce(acc - x.valuation), acc)


def teichmuller_lift(x: int, p: int, k: int) -> ResidueModPk:
    """The (p-1)-th root of unity in Z/p^k reducing to x mod p.

    Since t -> t^p contracts towards the Teichmüller representative by one
    digit per step, x^(p^(k-1)) already agrees with it modulo p^k.
    """
    if x % p == 0:
        raise ValueError("Teichmüller lift of 0 mod p is not a unit")
    q = p**k
    return ResidueModPk(p, k, pow(x, p ** max(k - 1, 0), q))


@lru_cache(maxsize=None)
def bernoulli_numbers(n: int) -> tuple[Fraction, ...]:
    """B_0..B_n with B_1 = -1/2."""
    B = [Fraction(1)]
    from math import comb
    for m in range(1, n + 1):
        B.append(-sum(comb(m + 1, j) * B[j] for j in range(m)) / (m + 1))
    return tuple(B)


@lru_cache(maxsize=64)
def padic_zeta3(p: int, k: int) -> ResidueModPk:
    """The Kubota-Leopoldt value L_p(3, omega^{-2}) modulo p^k.

    This is the p-adic zeta value zeta_p(3) entering alpha_3.  We use the
    closed expansion

        L_p(3, omega^-2) = 1/(2p) sum_{a=1}^{p-1} sum_j (-1)^j (j+1) B_j p^j a^{-2-j},

    obtained from the power-series form of L_p(s, chi) at s = 3.  Terms with
    j > k + 2 vanish modulo p^(k+1) because ord(p^j B_j) >= j - 1.
    """
    if p < 5:
        raise ValueError("p >= 5 required")
    J = k + 3
    q = p ** (k + 1)
    B = bernoulli_numbers(J)
    beta = []
    for j in range(J + 1):
        t = Fraction((-1) ** j * (j + 1)) * B[j] * Fraction(p) ** j
        beta.append(reduce_fraction(t, p, k + 1))
    total = 0
    for a in range(1, p):
        inv = pow(a, -1, q)
        s = beta[J]
        for j in range(J - 1, -1, -1):
            s = (s * inv + beta[j]) % q
        total += s * inv * inv
    total %= q
    if total % p:
        raise ArithmeticError("zeta_p(3) expansion is not divisible by p")
    return ResidueModPk(p, k, (total // p) * pow(2, -1, p**k) % p**k)


def padic_zeta3_kummer(p: int, k: int) -> ResidueModPk:
    """Slow oracle for zeta_p(3) through Kummer congruences.

    L_p(1 - m, omega^-2) = -(1 - p^(m-1)) B_m / m for m ≡ -2 mod (p-1), and
    taking m ≡ -2 mod (p-1)p^(k-1) puts 1 - m p-adically close to 3.
    """
    import sympy

    period = (p - 1) * p ** (k - 1)
    m = period - 2
    while m < k + 3:
        m += period
    Bm = sympy.bernoulli(m)
    v = -(1 - Fraction(p) ** (m - 1)) * Fraction(int(Bm.p), int(Bm.q)) / m
    return ResidueModPk(p, k, reduce_fraction(v, p, k))
