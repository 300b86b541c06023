"""Discrete consequences: Newman polynomials, B*[g] sets, symmetric subsets.

Multiplicities in ``A + A`` count ordered pairs, so that the multiplicity of
``k`` is exactly the coefficient of ``x^k`` in ``p(x)^2`` for
``p = sum_{a in A} x^a``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .stepfn import StepFunction, autoconvolve, sup_norm

__all__ = [
    "CONSTANT",
    "SIGMA",
    "CorollaryReport",
    "IntSet",
    "IntervalSet",
    "NonnegPolynomial",
    "PowersOfTwoReport",
    "all_subsets",
    "bstar_g",
    "check_corollary3",
    "check_corollary4",
    "newman",
    "newman_suite",
    "parse_coeffs",
    "powers_of_two_example",
    "random_interval_set",
    "random_newman",
    "ratio_R",
    "ratio_lower_chain",
    "square_coeffs",
    "square_height",
    "symmetric_subset_measure",
    "symmetric_subset_oracle",
]

CONSTANT = 0.631
SIGMA = 1.0 / math.sqrt(CONSTANT)


@dataclass(frozen=True)
class NonnegPolynomial:
    """``sum_i coefficients[i] x^i`` with nonnegative coefficients.

    Trailing zeros are dropped so the leading coefficient is positive.
    """

    coefficients: tuple

    def __post_init__(self):
        c = list(self.coefficients)
        if any(x < 0 for x in c):
            raise ValueError("coefficients must be nonnegative")
        while c and c[-1] == 0:
            c.pop()
        if not c:
            raise ValueError("zero polynomial")
        object.__setattr__(self, "coefficients", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def at_one(self):
        return sum(self.coefficients)


def parse_coeffs(text: str) -> NonnegPolynomial:
    """``"1,1,0,1"`` or a bare 0/1 string like ``"1101"``; constant term first."""
    text = text.strip()
    if "," in text:
        vals = [float(t) if "." in t or "e" in t.lower() else int(t) for t in text.split(",")]
    elif text and set(text) <= {"0", "1"}:
        vals = [int(ch) for ch in text]
    else:
        raise ValueError(f"cannot parse coefficients {text!r}")
    return NonnegPolynomial(tuple(vals))


def square_coeffs(p: NonnegPolynomial) -> list:
    """Coefficients of ``p^2`` by direct convolution over the nonzero terms."""
    nz = [(i, c) for i, c in enumerate(p.coefficients) if c]
    out = [0] * (2 * p.degree + 1)
    for i, a in nz:
        for j, b in nz:
            out[i + j] += a * b
    return out


def square_height(p: NonnegPolynomial):
    """``H(p^2)``, the largest coefficient of ``p^2``."""
    return max(square_coeffs(p))


def ratio_R(p: NonnegPolynomial) -> float:
    """``H(p^2) (deg p + 1) / p(1)^2``."""
    return square_height(p) * (p.degree + 1) / p.at_one() ** 2


@dataclass(frozen=True)
class IntSet:
    """Distinct integers inside ``{1, ..., universe_n}``, kept sorted."""

    elements: tuple
    universe_n: int

    def __post_init__(self):
        els = tuple(sorted(int(a) for a in self.elements))
        if len(set(els)) != len(els):
            raise ValueError("elements must be distinct")
        if not els:
            raise ValueError("set must be nonempty")
        if els[0] < 1 or els[-1] > self.universe_n:
            raise ValueError(f"elements must lie in 1..{self.universe_n}")
        object.__setattr__(self, "elements", els)

    def __len__(self) -> int:
        return len(self.elements)


def newman(A: IntSet) -> NonnegPolynomial:
    """``sum_{a in A} x^(a - min A)``; the shift keeps ``deg p <= n - 1``."""
    lo = A.elements[0]
    coeffs = [0] * (A.elements[-1] - lo + 1)
    for a in A.elements:
        coeffs[a - lo] = 1
    return NonnegPolynomial(tuple(coeffs))


def bstar_g(A: IntSet) -> int:
    """Largest multiplicity in the multiset ``{a + b : a, b in A}`` (ordered pairs)."""
    counts = Counter(a + b for a in A.elements for b in A.elements)
    return max(counts.values())


def all_subsets(n: int) -> Iterator[IntSet]:
    """Every nonempty subset of ``{1, ..., n}``, by bitmask order."""
    for mask in range(1, 1 << n):
        yield IntSet(tuple(i + 1 for i in range(n) if mask >> i & 1), n)


@dataclass(frozen=True)
class CorollaryReport:
    size: int
    n: int
    g: int
    lhs: float
    rhs: float
    holds: bool

    def to_dict(self) -> dict:
        return {"size": self.size, "n": self.n, "g": self.g, "lhs": self.lhs,
                "rhs": self.rhs, "holds": self.holds}


def check_corollary3(A: IntSet) -> CorollaryReport:
    """``|A| < sigma sqrt(g n)`` with ``sigma = 1/sqrt(0.631)``, i.e. ``g n > 0.631 |A|^2``."""
    g = bstar_g(A)
    n = A.universe_n
    size = len(A)
    holds = g * n > CONSTANT * size * size
    return CorollaryReport(size, n, g, float(size), SIGMA * math.sqrt(g * n), holds)


def check_corollary4(A: IntSet) -> CorollaryReport:
    """With ``eps = |A| / n``, some sum has multiplicity ``g > 0.631 eps^2 n``."""
    g = bstar_g(A)
    n = A.universe_n
    eps = len(A) / n
    rhs = CONSTANT * eps * eps * n
    return CorollaryReport(len(A), n, g, float(g), rhs, g > rhs)


# --------------------------------------------------------- symmetric subsets


@dataclass(frozen=True)
class IntervalSet:
    """Finite union of disjoint open intervals inside ``[0, 1]``."""

    intervals: tuple

    def __post_init__(self):
        ivs = tuple(sorted((float(a), float(b)) for a, b in self.intervals))
        if not ivs:
            raise ValueError("need at least one interval")
        for a, b in ivs:
            if not 0 <= a < b <= 1:
                raise ValueError(f"interval ({a}, {b}) not inside [0, 1]")
        for (_, b), (a, _) in zip(ivs, ivs[1:]):
            if a < b:
                raise ValueError("intervals overlap")
        object.__setattr__(self, "intervals", ivs)

    @property
    def measure(self) -> float:
        return math.fsum(b - a for a, b in self.intervals)

    def indicator(self) -> StepFunction:
        return StepFunction.from_intervals(self.intervals)


def symmetric_subset_measure(B: IntervalSet) -> float:
    """Measure of the largest centrally symmetric subset: ``||chi_B * chi_B||_inf``."""
    return sup_norm(autoconvolve(B.indicator()))


def symmetric_subset_oracle(B: IntervalSet) -> float:
    """``max_x mu(B cap (x - B))`` by interval intersection over all endpoint sums."""
    ivs = B.intervals
    ends = [e for iv in ivs for e in iv]
    best = 0.0
    for x in {p + q for p in ends for q in ends}:
        total = 0.0
        for a, b in ivs:
            for c, d in ivs:
                lo, hi = max(a, x - d), min(b, x - c)
                if hi > lo:
                    total += hi - lo
        best = max(best, total)
    return best


def random_interval_set(rng: np.random.Generator, max_intervals: int = 8,
                        denominator: int = 1024) -> IntervalSet:
    """Random union of 1..max_intervals intervals with dyadic endpoints."""
    k = int(rng.integers(1, max_intervals + 1))
    pts = np.sort(rng.choice(denominator + 1, size=2 * k, replace=False)) / denominator
    return IntervalSet(tuple(zip(pts[0::2], pts[1::2])))


# ------------------------------------------------------------ sharpness


@dataclass(frozen=True)
class PowersOfTwoReport:
    N: int
    sum_q2: int
    max_q: int
    sum_q: int

    @property
    def expected(self) -> tuple[int, int, int]:
        return (2 * self.N**2 - self.N, 2, self.N**2)

    @property
    def matches(self) -> bool:
        return self.N < 2 or (self.sum_q2, self.max_q, self.sum_q) == self.expected


def powers_of_two_example(N: int) -> PowersOfTwoReport:
    """``q = p^2`` for ``p = sum_{k<N} x^(2^k)``: returns ``sum q_i^2``, ``max q_i``, ``sum q_i``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    exps = [1 << k for k in range(N)]
    q = Counter(a + b for a in exps for b in exps)
    return PowersOfTwoReport(N, sum(c * c for c in q.values()), max(q.values()), sum(q.values()))


def ratio_lower_chain(A: IntSet) -> tuple[float, float]:
    """``(R(p), g n / |A|^2)`` for the Newman polynomial of ``A``."""
    p = newman(A)
    return ratio_R(p), bstar_g(A) * A.universe_n / len(A) ** 2


def random_newman(rng: np.random.Generator, max_degree: int = 64) -> NonnegPolynomial:
    d = int(rng.integers(1, max_degree + 1))
    density = rng.uniform(0.05, 1.0)
    bits = (rng.random(d + 1) < density).astype(int)
    bits[0] = bits[-1] = 1
    return NonnegPolynomial(tuple(int(b) for b in bits))


def newman_suite(count: int, seed: int, max_degree: int = 64) -> dict:
    """Minimum of ``R(p)`` over random Newman polynomials, and how many fall below 1."""
    rng = np.random.default_rng(seed)
    ratios = [ratio_R(random_newman(rng, max_degree)) for _ in range(count)]
    return {"count": count, "seed": seed, "min_R": min(ratios),
            "below_one": sum(r < 1 for r in ratios)}
