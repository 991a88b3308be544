"""Trace statistics, Sato-Tate classes, Hecke eigenvalues and exports.

Traces are normalized as x = a_1 / p^{(b-1)/2}, so that they lie in
[-b, b] and can be compared with the four reference distributions:

    Batman        pushforward of Haar measure on O(3) under the trace
    Wing          the component -SO(3)
    FlyingBatman  its CM counterpart
    ShiftedSemicircle  CM arcsine law shifted by -1, with a mass 1/2 at -1
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .evaluation import GOOD, EulerFactorRecord
from .pipeline import phi_star

CLASSES = ("Batman", "Wing", "FlyingBatman", "ShiftedSemicircle")

TARGET_MOMENTS = {
    "Batman": (1, 0, 1, 0, 3, 0),
    "Wing": (1, 0, 1, -1, 3, -6),
    "FlyingBatman": (1, 0, 2, 0, 10, 0),
    "ShiftedSemicircle": (1, -1, 2, -4, 10, -26),
}

POINT_MASSES = {
    "Batman": {},
    "Wing": {},
    "FlyingBatman": {-1.0: 0.25, 1.0: 0.25},
    "ShiftedSemicircle": {-1.0: 0.5},
}

SUPPORT = {
    "Batman": (-3.0, 3.0),
    "Wing": (-3.0, 1.0),
    "FlyingBatman": (-3.0, 3.0),
    "ShiftedSemicircle": (-3.0, 1.0),
}


@dataclass(frozen=True)
class MomentVector:
    m: tuple[float, ...]
    count: int

    def __getitem__(self, j):
        return self.m[j]

    def as_array(self) -> np.ndarray:
        return np.array(self.m, dtype=float)


@dataclass(frozen=True)
class DistributionClass:
    name: str
    distance: float
    distances: tuple[tuple[str, float], ...] = ()

    def within(self, threshold: float = 2.0) -> bool:
        return self.distance < threshold


def index_records(records) -> dict[int, dict[int, EulerFactorRecord]]:
    out: dict[int, dict[int, EulerFactorRecord]] = {}
    for r in records:
        out.setdefault(r.p, {})[r.phi_star] = r
    return out


def gather_traces(records, r: int, s: int, prime_count: int) -> list[tuple[int, int]]:
    """(p, a_1) at phi* = r/s mod p for the first prime_count usable primes."""
    if s == 0:
        raise ValueError("s must be nonzero")
    by_p = records if isinstance(records, dict) else index_records(records)
    out = []
    for p in sorted(by_p):
        if len(out) >= prime_count:
            break
        x = phi_star(r, s, p)
        if x is None:
            continue
        rec = by_p[p].get(x)
        if rec is None or rec.flag != GOOD or not rec.coeffs:
            continue
        out.append((p, rec.coeffs[0]))
    return out


def normalized(traces, b: int) -> np.ndarray:
    return np.array([a / p ** ((b - 1) / 2) for p, a in traces], dtype=float)


def compute_moments(traces, b: int) -> MomentVector:
    if not traces:
        raise ValueError("no traces given")
    x = normalized(traces, b)
    return MomentVector(tuple(float(np.mean(x**j)) for j in range(6)), len(x))


def moments_of_samples(x) -> MomentVector:
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ValueError("no samples given")
    return MomentVector(tuple(float(np.mean(x**j)) for j in range(6)), int(x.size))


def classify_distribution(M: MomentVector) -> DistributionClass:
    v = M.as_array()
    d = {name: float(np.sum((v - np.array(t, dtype=float)) ** 2)) for name, t in TARGET_MOMENTS.items()}
    best = min(d, key=d.get)
    return DistributionClass(best, d[best], tuple(sorted(d.items(), key=lambda kv: kv[1])))


def density(x: float, cls: str) -> float:
    """Continuous part of the density of class ``cls`` at x."""
    pi = math.pi
    if cls == "Wing":
        if -3 <= x < 1:
            return math.sqrt((3 + x) / (1 - x)) / (2 * pi)
        return 0.0
    if cls == "Batman":
        if abs(x) < 1:
            return ((3 + x) / math.sqrt(3 - 2 * x - x * x) + (3 - x) / math.sqrt(3 + 2 * x - x * x)) / (4 * pi)
        if abs(x) < 3:
            ax = abs(x)
            return (3 - ax) / (4 * pi * math.sqrt(3 + 2 * ax - ax * ax))
        return 0.0
    if cls == "FlyingBatman":
        if abs(x) < 1:
            return (1 / math.sqrt(3 - 2 * x - x * x) + 1 / math.sqrt(3 + 2 * x - x * x)) / (4 * pi)
        if abs(x) < 3:
            ax = abs(x)
            return 1 / (4 * pi * math.sqrt(3 + 2 * ax - ax * ax))
        return 0.0
    if cls == "ShiftedSemicircle":
        y = x + 1
        if abs(y) < 2:
            return 1 / (2 * pi * math.sqrt(4 - y * y))
        return 0.0
    raise ValueError(f"unknown class {cls!r}")


def point_masses(cls: str) -> dict[float, float]:
    return dict(POINT_MASSES[cls])


def density_moment(cls: str, j: int) -> float:
    """Quadrature of x^j against the density, point masses included."""
    from scipy.integrate import quad

    lo, hi = SUPPORT[cls]
    breaks = [t for t in (-3.0, -1.0, 1.0, 3.0) if lo <= t <= hi]
    total = 0.0
    for a, b in zip(breaks, breaks[1:]):
        # integrable 1/sqrt singularities sit on the break points
        val, _ = quad(lambda t: t**j * density(t, cls), a, b, limit=400, epsabs=1e-10, epsrel=1e-10)
        total += val
    total += sum(w * x**j for x, w in POINT_MASSES[cls].items())
    return total


def sample_distribution(cls: str, n: int, rng: np.random.Generator) -> np.ndarray:
    """Samples of the trace distribution from random orthogonal matrices.

    Batman: trace of a Haar O(3) matrix; Wing: trace on det = -1 component;
    FlyingBatman and ShiftedSemicircle: traces of their CM models.
    """
    if cls in ("Batman", "Wing"):
        theta = _sample_so3_angle(n, rng)
        tr = 1 + 2 * np.cos(theta)
        if cls == "Wing":
            return -tr
        sign = rng.choice([-1.0, 1.0], size=n)
        return sign * tr
    if cls == "FlyingBatman":
        # N(U(1)) x {±1}: with probability 1/2 a point mass ±1, else ±1 + 2cos(u)
        u = rng.uniform(0, 2 * np.pi, size=n)
        sign = rng.choice([-1.0, 1.0], size=n)
        cm = rng.random(n) < 0.5
        return np.where(cm, sign, sign + 2 * np.cos(u))
    if cls == "ShiftedSemicircle":
        # -1 plus a CM trace: 0 at inert primes, 2cos(u) at split ones
        u = rng.uniform(0, 2 * np.pi, size=n)
        mass = rng.random(n) < 0.5
        return np.where(mass, -1.0, -1 + 2 * np.cos(u))
    raise ValueError(cls)


def _sample_so3_angle(n, rng):
    # rotation angle density (1 - cos t)/pi on [0, pi]
    out = np.empty(0)
    while out.size < n:
        t = rng.uniform(0, np.pi, size=2 * n)
        keep = rng.uniform(0, 2, size=2 * n) < (1 - np.cos(t))
        out = np.concatenate([out, t[keep]])
    return out[:n]



# -------------------------------------------------------------------- Hecke

def hecke_eigenvalues(record: EulerFactorRecord) -> tuple[int, int]:
    """(lambda_1, lambda_2) = (-a_1, (a_2 - p - p^3)/p) for b = 4."""
    if record.flag != GOOD or len(record.coeffs) < 2:
        raise ValueError("Hecke eigenvalues need a good b=4 record")
    p = record.p
    a1, a2 = record.coeffs[:2]
    num = a2 - p - p**3
    if num % p:
        raise ArithmeticError(f"lambda_2 is not integral at p={p}")
    return -a1, num // p


# ------------------------------------------------------------------ exports

def euler_factor_lines(records, r: int, s: int) -> list[str]:
    """``p a_0 a_1 ... a_b`` per prime at phi = r/s, ascending p."""
    lines = []
    for p, recs in sorted(index_records(records).items()):
        x = phi_star(r, s, p)
        if x is None or x not in recs:
            continue
        rec = recs[x]
        if rec.flag != GOOD or rec.full is None:
            continue
        lines.append(" ".join(str(v) for v in [p, *rec.full]))
    return lines


def histogram(x, bins: int = 70, lo: float = -3.0, hi: float = 3.0, masses=(-1.0, 1.0)):
    """Density histogram of x with exact atoms split off.

    Returns (rows, atoms): rows are (bin_lo, bin_hi, relative_abundance)
    normalized against the full sample size so that the bars plus atoms
    integrate to one; atoms maps each listed x value to its sample fraction.
    """
    x = np.asarray(x, dtype=float)
    n = max(x.size, 1)
    atoms = {}
    keep = np.ones(x.size, dtype=bool)
    for m in masses:
        hit = np.isclose(x, m, rtol=0, atol=1e-12)
        atoms[m] = float(hit.sum()) / n
        keep &= ~hit
    counts, edges = np.histogram(x[keep], bins=bins, range=(lo, hi))
    width = (hi - lo) / bins
    rows = [(float(edges[i]), float(edges[i + 1]), float(counts[i]) / (n * width)) for i in range(bins)]
    return rows, atoms


def write_histogram_csv(x, path: str | Path, bins: int = 70) -> tuple[Path, Path]:
    rows, atoms = histogram(x, bins)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_lo", "bin_hi", "relative_abundance"])
        for row in rows:
            w.writerow([f"{row[0]:.6f}", f"{row[1]:.6f}", f"{row[2]:.8f}"])
    side = path.with_name(path.stem + "_point_masses.csv")
    with open(side, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "mass"])
        for m, v in atoms.items():
            w.writerow([f"{m:g}", f"{v:.8f}"])
    return path, side
