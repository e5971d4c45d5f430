"""Exact counts c_n for multisets, selections and assemblies.

The counts come from the logarithmic-derivative recurrence

    n c_n = sum_{m=1}^{n} Lambda(m) c_{n-m},   c_0 = 1,

where Lambda(m) = sum_{d|m} d b_d for multisets,
sum_{d|m} (-1)^(m/d+1) d b_d for selections and m b_m for assemblies.
Lambda is filled by a divisor sieve.  Assemblies additionally carry the
labelled counts s_n = n! c_n from the binomial recurrence
s_n = sum_k C(n-1, k-1) m_k s_{n-k} with m_k = k! b_k.

``count_bruteforce`` enumerates integer partitions of n and is kept
independent of the recurrences; it is the oracle in the tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .errors import IntegralityError, LogOfZeroError, PreconditionError
from .weights import StructureKind, WeightSequence

__all__ = [
    "CountTable",
    "LambdaCache",
    "lambda_values",
    "count_exact",
    "count_bruteforce",
    "log_count",
    "integer_partitions",
    "BRUTEFORCE_MAX_N",
]

BRUTEFORCE_MAX_N = 25


@dataclass(frozen=True)
class CountTable:
    kind: StructureKind
    N: int
    counts: tuple
    labelled: Optional[tuple] = None

    def __post_init__(self):
        if len(self.counts) != self.N + 1:
            raise ValueError("counts must hold c_0..c_N")
        if self.counts and self.counts[0] != 1:
            raise ValueError("c_0 must be 1")

    def __getitem__(self, n: int):
        return self.counts[n]


@dataclass(frozen=True)
class LambdaCache:
    kind: StructureKind
    values: tuple  # values[m-1] = Lambda(m)


def _integer_weights(w: WeightSequence, N: int) -> list[int]:
    out = []
    for k in range(1, N + 1):
        b = w.exact(k)
        if b < 0:
            raise PreconditionError(f"b_{k} = {b} is negative")
        if b.denominator != 1:
            raise IntegralityError(
                f"b_{k} = {w.value(k)} is not an integer; multiset/selection counts "
                "need integral type multiplicities"
            )
        out.append(int(b))
    return out


def _rational_weights(w: WeightSequence, N: int) -> list[Fraction]:
    out = [w.exact(k) for k in range(1, N + 1)]
    for k, b in enumerate(out, start=1):
        if b < 0:
            raise PreconditionError(f"b_{k} = {b} is negative")
    return out


def lambda_values(w: WeightSequence, kind: StructureKind, N: int) -> LambdaCache:
    kind = StructureKind.parse(kind)
    if kind is StructureKind.ASSEMBLY:
        b = _rational_weights(w, N)
        vals = [_normalize(m * b[m - 1]) for m in range(1, N + 1)]
        return LambdaCache(kind, tuple(vals))
    b = _integer_weights(w, N)
    lam = [0] * (N + 1)
    alternating = kind is StructureKind.SELECTION
    for d in range(1, N + 1):
        bd = b[d - 1]
        if not bd:
            continue
        step = d * bd
        for j, m in enumerate(range(d, N + 1, d), start=1):
            if alternating and j % 2 == 0:
                lam[m] -= step
            else:
                lam[m] += step
    return LambdaCache(kind, tuple(lam[1:]))


def _normalize(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def count_exact(w: WeightSequence, kind, N: int) -> CountTable:
    """Exact c_0..c_N (ints, or Fractions for assemblies)."""
    kind = StructureKind.parse(kind)
    if N < 0:
        raise ValueError(f"N must be nonnegative, got {N}")
    lam = lambda_values(w, kind, N).values
    if kind is StructureKind.ASSEMBLY:
        return _count_assembly(w, N, lam)
    c = [1] + [0] * N
    for n in range(1, N + 1):
        acc = 0
        for m in range(1, n + 1):
            acc += lam[m - 1] * c[n - m]
        q, rem = divmod(acc, n)
        if rem:
            raise AssertionError(f"non-integral count at n={n}")  # cannot happen for integer b_k
        c[n] = q
    return CountTable(kind, N, tuple(c))


def _count_assembly(w: WeightSequence, N: int, lam) -> CountTable:
    m = [_normalize(w.exact(k) * math.factorial(k)) for k in range(1, N + 1)]
    s = [1] + [0] * N
    for n in range(1, N + 1):
        acc = 0
        for k in range(1, n + 1):
            if m[k - 1]:
                acc += math.comb(n - 1, k - 1) * m[k - 1] * s[n - k]
        s[n] = _normalize(acc) if isinstance(acc, Fraction) else acc
    counts = tuple(_normalize(Fraction(s[n]) / math.factorial(n)) for n in range(N + 1))
    return CountTable(StructureKind.ASSEMBLY, N, counts, tuple(s))


def integer_partitions(n: int, largest: Optional[int] = None) -> Iterator[dict]:
    """Partitions of n as {part: multiplicity}, parts in decreasing order."""
    if largest is None:
        largest = n
    if n == 0:
        yield {}
        return
    for part in range(min(n, largest), 0, -1):
        for rest in integer_partitions(n - part, part):
            out = dict(rest)
            out[part] = out.get(part, 0) + 1
            yield out


def count_bruteforce(w: WeightSequence, kind, N: int) -> CountTable:
    """Counts by explicit enumeration of partition shapes, N <= 25.

    For every partition of n with j_k parts of size k:
    multisets pick j_k parts out of b_k types with repetition,
    C(b_k + j_k - 1, j_k) ways; selections pick distinct types, C(b_k, j_k);
    assemblies distribute n labels over the blocks,
    n! / prod(k!^j_k j_k!) ways, times prod m_k^j_k component structures.
    """
    kind = StructureKind.parse(kind)
    if N > BRUTEFORCE_MAX_N:
        raise PreconditionError(f"brute force is limited to N <= {BRUTEFORCE_MAX_N}, got {N}")
    if N < 0:
        raise ValueError(f"N must be nonnegative, got {N}")
    if kind is StructureKind.ASSEMBLY:
        mk = [None] + [w.exact(k) * math.factorial(k) for k in range(1, N + 1)]
        labelled = []
        for n in range(N + 1):
            total = Fraction(0)
            for shape in integer_partitions(n):
                ways = Fraction(math.factorial(n))
                for k, j in shape.items():
                    ways *= mk[k] ** j / (Fraction(math.factorial(k)) ** j * math.factorial(j))
                total += ways
            labelled.append(_normalize(total))
        counts = tuple(_normalize(Fraction(s) / math.factorial(n)) for n, s in enumerate(labelled))
        return CountTable(kind, N, counts, tuple(labelled))

    b = [None] + _integer_weights(w, N)
    counts = []
    for n in range(N + 1):
        total = 0
        for shape in integer_partitions(n):
            ways = 1
            for k, j in shape.items():
                if kind is StructureKind.MULTISET:
                    ways *= math.comb(b[k] + j - 1, j)
                else:
                    ways *= math.comb(b[k], j)
                if not ways:
                    break
            total += ways
        counts.append(total)
    return CountTable(kind, N, tuple(counts))


def log_count(t: CountTable, n: int) -> float:
    """Natural log of c_n without converting the big number to float."""
    if not 0 <= n <= t.N:
        raise ValueError(f"n={n} outside table range 0..{t.N}")
    c = t.counts[n]
    if c == 0:
        raise LogOfZeroError(f"c_{n} = 0 for {t.kind.name.lower()}")
    c = Fraction(c)
    return math.log(c.numerator) - math.log(c.denominator)
