"""Types of sequences and variance-typical sets.

Words are tuples of letter indices ``0..a-1``. Membership in a
variance-typical set depends only on the letter counts, so most quantities
here are computed by summing over admissible count vectors rather than by
enumerating words.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .reports import Report

WOLFOWITZ_K = 2 * math.log2(math.e) / math.e
# slack on |N - nP| <= delta sqrt(n) sqrt(P(1-P)) for boundary cases like P=1/3
TYPICAL_TOL = 1e-9
DEFAULT_ENUM_CAP = 10**7


class EnumerationCapError(ValueError):
    """Enumeration would exceed the configured cap."""


@dataclass(frozen=True)
class TypeDistribution:
    counts: tuple[int, ...]
    n: int

    @property
    def distribution(self) -> np.ndarray:
        if self.n == 0:
            raise ValueError("the empty word has no type distribution")
        return np.asarray(self.counts, dtype=float) / self.n


@dataclass(frozen=True)
class TypicalSetSpec:
    """The variance-typical set ``T^n_{P,delta}``."""

    P: tuple[float, ...]
    n: int
    delta: float

    def __post_init__(self):
        p = np.asarray(self.P, dtype=float)
        if p.ndim != 1 or np.any(p < 0) or abs(p.sum() - 1) > 1e-10:
            raise ValueError(f"P is not a probability vector: {self.P!r}")
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if self.delta < 0:
            raise ValueError("delta must be non-negative")
        object.__setattr__(self, "P", tuple(float(x) for x in p))

    @property
    def a(self) -> int:
        return len(self.P)


def type_of(word, a: int) -> TypeDistribution:
    counts = [0] * a
    for x in word:
        if not 0 <= x < a:
            raise ValueError(f"letter {x} outside alphabet of size {a}")
        counts[x] += 1
    return TypeDistribution(tuple(counts), len(word))


def counts_are_typical(counts, P, n: int, delta: float) -> bool:
    for c, p in zip(counts, P):
        if abs(c - n * p) > delta * math.sqrt(n) * math.sqrt(max(p * (1 - p), 0.0)) + TYPICAL_TOL:
            return False
    return True


def is_variance_typical(word, spec: TypicalSetSpec) -> bool:
    if len(word) != spec.n:
        raise ValueError(f"word has length {len(word)}, expected {spec.n}")
    return counts_are_typical(type_of(word, spec.a).counts, spec.P, spec.n, spec.delta)


def compositions(n: int, a: int):
    """All count vectors of ``a`` non-negative integers summing to ``n``."""
    if a == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in compositions(n - first, a - 1):
            yield (first,) + rest


def typical_counts(spec: TypicalSetSpec) -> list[tuple[int, ...]]:
    return [c for c in compositions(spec.n, spec.a) if counts_are_typical(c, spec.P, spec.n, spec.delta)]


def multinomial(counts) -> int:
    out, total = 1, 0
    for c in counts:
        total += c
        out *= math.comb(total, c)
    return out


def enumerate_typical_set(spec: TypicalSetSpec, cap: int = DEFAULT_ENUM_CAP) -> list[tuple[int, ...]]:
    """Members of ``T^n_{P,delta}`` in lexicographic order."""
    if spec.a**spec.n > cap:
        raise EnumerationCapError(f"{spec.a}^{spec.n} words exceed enumeration cap {cap}")
    allowed = set(typical_counts(spec))
    return [
        w for w in itertools.product(range(spec.a), repeat=spec.n)
        if type_of(w, spec.a).counts in allowed
    ]


def count_probability(counts, P) -> float:
    """``P^{(x)n}`` of one word with the given counts."""
    return math.prod(p**c for p, c in zip(P, counts))


def typical_set_probability(spec: TypicalSetSpec) -> float:
    """Exact ``P^{(x)n}(T^n_{P,delta})`` as a multinomial sum over admissible counts."""
    return math.fsum(multinomial(c) * count_probability(c, spec.P) for c in typical_counts(spec))


def typical_set_size(spec: TypicalSetSpec) -> int:
    return sum(multinomial(c) for c in typical_counts(spec))


def first_word_with_counts(counts) -> tuple[int, ...]:
    """Lexicographically smallest word with the given counts."""
    return tuple(x for x, c in enumerate(counts) for _ in range(c))


def neg_log_probability(counts, P) -> float:
    return -math.fsum(c * math.log2(p) for c, p in zip(counts, P) if c)


def shannon_entropy(P) -> float:
    return -math.fsum(p * math.log2(p) for p in P if p > 0)


def _fmt_word(word) -> str:
    return ",".join(str(x) for x in word)


def lemma1_bounds_check(spec: TypicalSetSpec) -> Report:
    """Check the typical-sequence lemma on ``T^n_{P,delta}`` exactly.

    Checks: set probability >= 1 - a/delta^2; every member's
    ``|-log P^n(x^n) - nH(P)| <= K a delta sqrt(n)``; and
    ``(1 - a/delta^2) 2^{nH - K a delta sqrt n} <= |T| <= 2^{nH + K a delta sqrt n}``.
    """
    a, n, delta = spec.a, spec.n, spec.delta
    report = Report("lemma1", f"P={list(spec.P)};n={n};delta={delta}")
    nh = n * shannon_entropy(spec.P)
    band = WOLFOWITZ_K * a * delta * math.sqrt(n)
    chebyshev = 1 - a / delta**2 if delta > 0 else -math.inf

    members = typical_counts(spec)
    prob = math.fsum(multinomial(c) * count_probability(c, spec.P) for c in members)
    size = sum(multinomial(c) for c in members)
    report.lower("probability", chebyshev, prob)

    worst, witness = 0.0, ""
    for c in members:
        dev = abs(neg_log_probability(c, spec.P) - nh)
        if dev >= worst:
            worst, witness = dev, _fmt_word(first_word_with_counts(c))
    report.upper("word_log_probability", band, worst, witness)

    upper = 2.0 ** (nh + band)
    report.upper("cardinality_upper", upper, size, tol=1e-9 * max(1.0, upper))
    lower = chebyshev * 2.0 ** (nh - band)
    report.lower("cardinality_lower", lower, size, "vacuous" if chebyshev <= 0 else "",
                 tol=1e-9 * max(1.0, abs(lower)))
    return report


def number_of_types(n: int, a: int) -> int:
    return math.comb(n + a - 1, a - 1)
