"""
Kostka numbers as lattice-point counts of Gelfand-Tsetlin patterns.

A pattern is built from the top row (lambda) downward; row k has k entries, interlaces
the row above, and sums to mu_1 + ... + mu_k. Kostka numbers are symmetric in mu, so
any order of mu may be given.
"""
from fractions import Fraction
from typing import Dict, Iterator, List, Sequence, Tuple

from ..base.errors import InputError
from ..certarith.certified import Rational, as_fraction
from ..domain.partition import Instance

Row = Tuple[int, ...]
Pattern = Tuple[Row, ...]


def _integral(values: Sequence[Rational], what: str) -> Row:
    parts = tuple(as_fraction(v) for v in values)
    if any(p.denominator != 1 for p in parts):
        raise InputError(f"{what} must be integral, got {[str(p) for p in parts]}")
    return tuple(int(p) for p in parts)


def _validate(lam, mu) -> Tuple[Row, Row]:
    if isinstance(lam, Instance):
        lam, mu = lam.original_lam.parts, lam.original_mu.entries
    if mu is None:
        raise InputError("mu is required unless an Instance is given")
    lam = _integral(getattr(lam, "parts", lam), "lambda")
    mu = _integral(getattr(mu, "entries", mu), "mu")
    if len(lam) != len(mu):
        raise InputError(f"length mismatch: lambda has {len(lam)} parts, mu has {len(mu)}")
    if not lam:
        raise InputError("lambda must have at least one part")
    if any(lam[i] < lam[i + 1] for i in range(len(lam) - 1)):
        raise InputError(f"lambda must be non-increasing, got {list(lam)}")
    return lam, mu


def _prefix(mu: Row) -> List[int]:
    prefix = [0]
    for m in mu:
        prefix.append(prefix[-1] + m)
    return prefix


def interlacing_rows(upper: Row, total: int) -> Iterator[Row]:
    """
    Integer rows y of length len(upper) - 1 with upper[j+1] <= y[j] <= upper[j] and sum(y) = total.
    """
    k = len(upper) - 1
    # Largest and smallest sums reachable by the entries from position j on.
    max_tail = [0] * (k + 1)
    min_tail = [0] * (k + 1)
    for j in range(k - 1, -1, -1):
        max_tail[j] = max_tail[j + 1] + upper[j]
        min_tail[j] = min_tail[j + 1] + upper[j + 1]

    def extend(j: int, remaining: int, row: List[int]):
        if j == k:
            if remaining == 0:
                yield tuple(row)
            return
        low = max(upper[j + 1], remaining - max_tail[j + 1])
        high = min(upper[j], remaining - min_tail[j + 1])
        for value in range(low, high + 1):
            row.append(value)
            yield from extend(j + 1, remaining - value, row)
            row.pop()

    if min_tail[0] <= total <= max_tail[0]:
        yield from extend(0, total, [])


def kostka_count(lam, mu=None) -> int:
    """
    Number of integral GT patterns with top row lambda and weight mu.

    Parameters:
    - lam (Partition or sequence): Integral, non-increasing top row.
    - mu (Weight or sequence): Integral weight, any order. An Instance may be passed as `lam`.

    Returns:
    - int: K(lambda, mu); 0 when lambda does not majorize mu or the totals differ.
    """
    lam, mu = _validate(lam, mu)
    n = len(lam)
    prefix = _prefix(mu)
    if prefix[n] != sum(lam):
        return 0
    cache: Dict[Row, int] = {}

    def count(row: Row) -> int:
        k = len(row)
        if k == 1:
            return 1
        if k == 2:
            return 1 if row[1] <= mu[0] <= row[0] else 0
        if k == 3:
            r1, r2, r3 = row
            m2, m1 = prefix[2], mu[0]
            return max(0, min(r1, m2 - r3) - max(r2, m2 - r2, m1, m2 - m1) + 1)
        cached = cache.get(row)
        if cached is None:
            cached = sum(count(child) for child in interlacing_rows(row, prefix[k - 1]))
            cache[row] = cached
        return cached

    return count(lam)


def enumerate_patterns(lam, mu=None) -> Iterator[Pattern]:
    """
    Every integral GT pattern with top row lambda and weight mu, as a tuple of rows
    with the bottom row (length 1) first and lambda last.
    """
    lam, mu = _validate(lam, mu)
    n = len(lam)
    prefix = _prefix(mu)
    if prefix[n] != sum(lam):
        return

    def descend(rows: List[Row]):
        row = rows[-1]
        if len(row) == 1:
            yield tuple(reversed(rows))
            return
        for child in interlacing_rows(row, prefix[len(row) - 1]):
            rows.append(child)
            yield from descend(rows)
            rows.pop()

    yield from descend([lam])


def pattern_weight(pattern: Sequence[Sequence[Rational]]) -> Tuple[Fraction, ...]:
    """Row-sum increments of a pattern given bottom row first: w_k = |row_k| - |row_(k-1)|."""
    weights, previous = [], Fraction(0)
    for row in pattern:
        total = sum((as_fraction(v) for v in row), Fraction(0))
        weights.append(total - previous)
        previous = total
    return tuple(weights)


def scaling_limit(lam, mu=None, N: int = 1) -> Fraction:
    """
    K(N lambda, N mu) / N^d with d = (n-1)(n-2)/2; tends to the volume of the projected
    Kostka polytope as N grows.
    """
    if isinstance(lam, Instance):
        lam, mu = lam.original_lam.parts, lam.original_mu.entries
    if mu is None:
        raise InputError("scaling_limit needs mu")
    if not isinstance(N, int) or N < 1:
        raise InputError(f"N must be a positive integer, got {N!r}")
    lam, mu = _validate(lam, mu)
    n = len(lam)
    dim = (n - 1) * (n - 2) // 2
    count = kostka_count(tuple(N * p for p in lam), tuple(N * m for m in mu))
    return Fraction(count, N ** dim)
